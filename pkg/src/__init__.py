"""Liouville solver - zeros of polynomial systems composed with Liouville functions."""
