"""Arbitrary-precision complex arithmetic on top of mpmath.

Working values are mpmath ``mpc`` numbers. Their binary exponent is an
unbounded Python integer, so quantities such as 1/a_6 = 2^(-86,400,000)
are represented exactly and nothing ever underflows to zero.

mpmath keeps its precision on a context object and temporarily mutates it
inside routines such as ``svd`` or ``qr``. Contexts are therefore cached
per thread and per precision: concurrent solves never share one.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import mpmath
from mpmath.libmp import from_int, mpf_div, prec_to_dps, round_nearest

from .config import PRECISION_BITS

# An mpmath mpc bound to some working-precision context
ExtendedComplex = Any

_local = threading.local()


def get_context(prec: int = PRECISION_BITS) -> mpmath.MPContext:
    """Return this thread's mpmath context at the given precision.

    Args:
        prec: Mantissa precision in bits.

    Returns:
        A context whose ``prec`` is ``prec``. Never shared across threads.
    """
    if prec < 16:
        raise ValueError(f"Precision must be at least 16 bits, got {prec}")
    cache = getattr(_local, "contexts", None)
    if cache is None:
        cache = _local.contexts = {}
    ctx = cache.get(prec)
    if ctx is None:
        ctx = mpmath.MPContext()
        ctx.prec = prec
        cache[prec] = ctx
    return ctx


def digits_for(prec: int) -> int:
    """Decimal digits that faithfully represent ``prec`` bits."""
    return prec_to_dps(prec)


@dataclass(frozen=True)
class GaussianRational:
    """An exact complex number with rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, value: Any) -> "GaussianRational":
        """Coerce int, Fraction, decimal string or GaussianRational.

        Strings are parsed with :func:`parse_exact_complex`.
        """
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value), Fraction(0))
        if isinstance(value, str):
            return parse_exact_complex(value)
        raise TypeError(f"Cannot convert {type(value).__name__} to an exact complex number")

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    def __add__(self, other: Any) -> "GaussianRational":
        other = GaussianRational.of(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: Any) -> "GaussianRational":
        return self + (-GaussianRational.of(other))

    def __rsub__(self, other: Any) -> "GaussianRational":
        return GaussianRational.of(other) - self

    def __mul__(self, other: Any) -> "GaussianRational":
        other = GaussianRational.of(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "GaussianRational":
        other = GaussianRational.of(other)
        if other.is_zero:
            raise ZeroDivisionError("division by exact zero")
        scale = other.abs2()
        num = self * other.conjugate()
        return GaussianRational(num.re / scale, num.im / scale)

    def __rtruediv__(self, other: Any) -> "GaussianRational":
        return GaussianRational.of(other) / self

    def __pow__(self, exponent: int) -> "GaussianRational":
        if exponent < 0:
            return GaussianRational(Fraction(1)) / (self ** (-exponent))
        result = GaussianRational(Fraction(1))
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def to_complex(self, ctx: mpmath.MPContext) -> ExtendedComplex:
        """Round to the context precision (each part rounded once)."""
        return ctx.mpc(exact_ratio(ctx, self.re), exact_ratio(ctx, self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        return f"{self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}j"


def exact_ratio(ctx: mpmath.MPContext, value: Fraction | int) -> Any:
    """Correctly rounded mpf for an exact rational (single rounding)."""
    value = Fraction(value)
    return ctx.make_mpf(
        mpf_div(from_int(value.numerator), from_int(value.denominator), ctx.prec, round_nearest)
    )


# "1.5", "-2", "3/4", "1e-3", "0.25+1.5j", "-2j", "1-0.5i"
_REAL = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"
_COMPLEX_RE = re.compile(
    rf"^\s*(?P<re>{_REAL})?\s*(?:(?P<im>[+-]\s*(?:\d+(?:\.\d*)?|\.\d+)?(?:[eE][+-]?\d+)?(?:/\d+)?)\s*[jJiI])?\s*$"
)


def _parse_real(text: str) -> Fraction:
    text = text.replace(" ", "")
    if text in ("+", "-", ""):
        return Fraction(-1 if text == "-" else 1)
    return Fraction(text)


def parse_exact_complex(text: str) -> GaussianRational:
    """Parse a decimal or rational complex literal exactly.

    Args:
        text: e.g. "0.0625", "3/4", "0.5-2j", "1e-3+1e-3j", "2j".

    Returns:
        The exact value.

    Raises:
        ValueError: If the literal is malformed.
    """
    raw = text.strip()
    if not raw:
        raise ValueError("empty complex literal")
    # "2j" alone: a pure imaginary with no real part
    pure_imag = re.fullmatch(rf"\s*({_REAL})?\s*[jJiI]\s*", raw)
    if pure_imag:
        coefficient = pure_imag.group(1)
        return GaussianRational(Fraction(0), _parse_real(coefficient or "+"))
    match = _COMPLEX_RE.match(raw)
    if not match or (match.group("re") is None and match.group("im") is None):
        raise ValueError(f"Malformed complex literal: {text!r}")
    real = Fraction(match.group("re")) if match.group("re") else Fraction(0)
    imag = _parse_real(match.group("im")) if match.group("im") else Fraction(0)
    return GaussianRational(real, imag)


def to_complex(ctx: mpmath.MPContext, value: Any) -> ExtendedComplex:
    """Convert any supported number to an mpc of ``ctx``.

    Exact inputs (int, Fraction, GaussianRational, decimal strings) are
    rounded once; mpmath inputs from other contexts are re-rounded.
    """
    if isinstance(value, GaussianRational):
        return value.to_complex(ctx)
    if isinstance(value, (int, Fraction)):
        return ctx.mpc(exact_ratio(ctx, Fraction(value)))
    if isinstance(value, str):
        return parse_exact_complex(value).to_complex(ctx)
    return ctx.mpc(value)


def to_vector(ctx: mpmath.MPContext, values: Any) -> list[ExtendedComplex]:
    """Convert an iterable of numbers to a list of mpc."""
    return [to_complex(ctx, v) for v in values]


def norm2(ctx: mpmath.MPContext, values: list[ExtendedComplex]) -> Any:
    """Euclidean norm of a complex vector."""
    return ctx.sqrt(ctx.fsum(abs(v) ** 2 for v in values)) if values else ctx.zero


def norm_inf(ctx: mpmath.MPContext, values: list[ExtendedComplex]) -> Any:
    """Max-modulus norm of a complex vector."""
    return max((abs(v) for v in values), default=ctx.zero)


def log2_abs(ctx: mpmath.MPContext, value: Any) -> Any:
    """log2 |value|; -inf for zero."""
    magnitude = abs(value)
    if magnitude == 0:
        return ctx.ninf
    return ctx.log(magnitude, 2)


def ceil_log2(ctx: mpmath.MPContext, value: Any) -> int:
    """Smallest integer k with |value| <= 2^k (value nonzero)."""
    mantissa, exponent = ctx.frexp(abs(value))
    # |value| = mantissa * 2^exponent with mantissa in [1/2, 1)
    if mantissa == 0.5:
        return int(exponent) - 1
    return int(exponent)


def complex_matrix(ctx: mpmath.MPContext, rows: int, cols: int) -> Any:
    """A rows x cols matrix of complex zeros (forces the complex SVD path)."""
    M = ctx.matrix(rows, cols)
    for i in range(rows):
        for j in range(cols):
            M[i, j] = ctx.mpc(0)
    return M


def singular_values(ctx: mpmath.MPContext, M: Any) -> list[Any]:
    """Singular values of a complex matrix, largest first.

    Wide matrices are transposed first; mpmath's SVD expects rows >= cols.
    """
    if M.rows < M.cols:
        M = M.H
    values = ctx.svd_c(M, compute_uv=False)
    return sorted((ctx.mpf(abs(values[i])) for i in range(values.rows)), reverse=True)


# ==================== DIRECTED ROUNDING ====================

def add_up(ctx: mpmath.MPContext, a: Any, b: Any) -> Any:
    return ctx.fadd(a, b, rounding="u")


def mul_up(ctx: mpmath.MPContext, a: Any, b: Any) -> Any:
    return ctx.fmul(a, b, rounding="u")


def inflate(ctx: mpmath.MPContext, value: Any, ulps: int = 4) -> Any:
    """Upper bound for a non-negative value computed with nearest rounding."""
    return mul_up(ctx, value, ctx.fadd(1, ctx.ldexp(1, ulps - ctx.prec), rounding="u"))


def abs_up(ctx: mpmath.MPContext, value: Any) -> Any:
    """Upper bound on |value|."""
    return inflate(ctx, abs(value))


def sum_up(ctx: mpmath.MPContext, values: list[Any]) -> Any:
    """Upward-rounded sum of non-negative values, smallest first."""
    total = ctx.zero
    for value in sorted(values):
        total = add_up(ctx, total, value)
    return total


def pow_up(ctx: mpmath.MPContext, base: Any, exponent: int) -> Any:
    """Upper bound on base**exponent for non-negative base."""
    result = ctx.one
    for _ in range(exponent):
        result = mul_up(ctx, result, base)
    return result


# ==================== FORMATTING ====================

def decimal_string(ctx: mpmath.MPContext, value: Any, digits: int | None = None) -> str:
    """Decimal string of a real mpf at ``digits`` significant digits."""
    if digits is None:
        digits = digits_for(ctx.prec)
    return ctx.nstr(ctx.mpf(value), digits, strip_zeros=True, min_fixed=-8, max_fixed=digits)


def complex_to_strings(ctx: mpmath.MPContext, value: Any, digits: int | None = None) -> dict[str, str]:
    """{"re": ..., "im": ...} decimal strings of an mpc."""
    value = ctx.mpc(value)
    return {
        "re": decimal_string(ctx, value.real, digits),
        "im": decimal_string(ctx, value.imag, digits),
    }
