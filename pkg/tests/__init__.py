"""Tests for the Liouville solver."""
