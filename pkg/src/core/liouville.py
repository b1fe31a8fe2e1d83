"""Liouville coefficient sequences, partial sums and certified tail bounds.

H(x) = sum_{i>=1} x^i / a_i with integer denominators growing so fast that
|a_{i+1}| > |a_i|^(i^l) for every l from some index on. Sequences are kept
as exact log2 magnitudes: a_6 of the default tower already has 86,400,000
bits, and only 1/a_i is ever needed.
"""

import logging
from fractions import Fraction
from math import factorial
from typing import Any, Sequence

from .config import MATERIALIZE_CAP_BITS, PRECISION_BITS, SEQUENCE_LENGTH, TAIL_PROBE_COUNT
from .exceptions import InvalidIndex, InvalidSequence, RatioTestFailed
from .models import AuditReport, AuditRow, LiouvilleSequence
from .numeric import (
    ExtendedComplex,
    GaussianRational,
    ceil_log2,
    exact_ratio,
    get_context,
    mul_up,
    pow_up,
    sum_up,
    to_complex,
)

logger = logging.getLogger(__name__)

_KIND_ALIASES = {"user": "user_supplied", "user_supplied": "user_supplied"}


# ==================== CONSTRUCTION ====================

def make_sequence(
    kind: str,
    params: Sequence[int | str] | None = None,
    length: int = SEQUENCE_LENGTH,
) -> LiouvilleSequence:
    """Build a coefficient sequence.

    Args:
        kind: "default_tower" (a_1 = 2, a_{i+1} = a_i^(i^i)), "factorial_pow2"
            (a_i = 2^(i!)), or "user" / "user_supplied".
        params: Exact integers (or decimal integer strings) for user sequences.
        length: Number of entries generated for the recurrence kinds.

    Returns:
        The immutable sequence.

    Raises:
        InvalidSequence: On an unknown kind, a zero or non-integer entry, or
            params given for a recurrence kind.
    """
    kind = _KIND_ALIASES.get(kind, kind)

    if kind in ("default_tower", "factorial_pow2"):
        if params:
            raise InvalidSequence(f"Sequence kind {kind} takes no values")
        if length < 1:
            raise InvalidSequence("Sequence length must be positive")
        if kind == "default_tower":
            logs = [1]
            for i in range(1, length):
                logs.append(i**i * logs[-1])
        else:
            logs = [factorial(i) for i in range(1, length + 1)]
        return LiouvilleSequence(
            kind=kind,
            signs=(1,) * length,
            log2_magnitudes=tuple(logs),
            log2_upper=tuple(logs),
        )

    if kind != "user_supplied":
        raise InvalidSequence(f"Unknown sequence kind: {kind}")
    if not params:
        raise InvalidSequence("User sequence needs at least one value")

    values = []
    for position, raw in enumerate(params, start=1):
        try:
            value = int(str(raw).strip()) if isinstance(raw, str) else int(raw)
        except (TypeError, ValueError) as e:
            raise InvalidSequence(f"a_{position} = {raw!r} is not an integer") from e
        if isinstance(raw, float) and raw != value:
            raise InvalidSequence(f"a_{position} = {raw!r} is not an integer")
        if value == 0:
            raise InvalidSequence(f"a_{position} is zero")
        values.append(value)

    lows, highs = [], []
    for value in values:
        magnitude = abs(value)
        lo = magnitude.bit_length() - 1
        lows.append(lo)
        highs.append(lo if magnitude & (magnitude - 1) == 0 else lo + 1)

    return LiouvilleSequence(
        kind="user_supplied",
        signs=tuple(1 if v > 0 else -1 for v in values),
        log2_magnitudes=tuple(lows),
        log2_upper=tuple(highs),
        values=tuple(values),
    )


def _check_index(seq: LiouvilleSequence, i: int) -> None:
    if i < 1:
        raise InvalidIndex(f"Sequence index must be >= 1, got {i}")
    if i > seq.length:
        raise InvalidIndex(f"Index {i} beyond sequence length {seq.length}")


def materialize(seq: LiouvilleSequence, i: int, cap_bits: int = MATERIALIZE_CAP_BITS) -> int:
    """The exact integer a_i, refused above ``cap_bits`` bits.

    Raises:
        InvalidIndex: If i is out of range or a_i is too large to materialize.
    """
    _check_index(seq, i)
    if seq.values is not None:
        return seq.values[i - 1]
    log2 = seq.log2_magnitudes[i - 1]
    if log2 > cap_bits:
        raise InvalidIndex(f"a_{i} has {log2} bits, above the {cap_bits}-bit cap")
    return seq.signs[i - 1] * (1 << log2)


# ==================== GROWTH AUDIT ====================

def _growth_check(seq: LiouvilleSequence, i: int, l: int) -> tuple[bool, int, int]:
    """Decide |a_{i+1}| > |a_i|^(i^l) and return (passed, lhs_log2, rhs_log2)."""
    exponent = i**l
    lhs = seq.log2_magnitudes[i]
    rhs = exponent * seq.log2_upper[i - 1]
    if seq.is_power_of_two(i) and seq.is_power_of_two(i + 1):
        return lhs > exponent * seq.log2_magnitudes[i - 1], lhs, rhs
    if lhs > rhs:
        return True, lhs, rhs
    if seq.log2_upper[i] <= exponent * seq.log2_magnitudes[i - 1]:
        return False, lhs, rhs
    # Bounds overlap, so |a_i|^(i^l) has about as many bits as the stored a_{i+1}
    if seq.values is not None:
        return abs(seq.values[i]) > abs(seq.values[i - 1]) ** exponent, lhs, rhs
    return abs(materialize(seq, i + 1)) > abs(materialize(seq, i)) ** exponent, lhs, rhs


def audit_growth(seq: LiouvilleSequence, l: int, i_max: int) -> AuditReport:
    """Check |a_{i+1}| > |a_i|^(i^l) for i = 1..i_max with exact integers.

    Args:
        seq: Sequence to audit.
        l: Growth exponent (l >= 1).
        i_max: Last index checked; needs a_{i_max + 1}.

    Returns:
        AuditReport with one row per index, the least index from which every
        check through i_max passes, and the first failing index.

    Raises:
        InvalidIndex: If l or i_max is not positive or i_max exceeds length - 1.
    """
    if l < 1:
        raise InvalidIndex(f"Audit exponent l must be >= 1, got {l}")
    if i_max < 1 or i_max > seq.length - 1:
        raise InvalidIndex(f"i_max must be in [1, {seq.length - 1}], got {i_max}")

    rows = []
    for i in range(1, i_max + 1):
        passed, lhs, rhs = _growth_check(seq, i, l)
        rows.append(AuditRow(i=i, lhs_log2=lhs, rhs_log2=rhs, passed=passed))

    least_all_true = None
    for row in reversed(rows):
        if not row.passed:
            break
        least_all_true = row.i
    first_failing = next((row.i for row in rows if not row.passed), None)

    logger.debug(f"Audit {seq.kind} l={l} through {i_max}: least all-true index {least_all_true}")
    return AuditReport(
        kind=seq.kind,
        l=l,
        i_max=i_max,
        rows=rows,
        least_all_true=least_all_true,
        first_failing=first_failing,
        admissible=least_all_true is not None,
    )


def extend_sequence(seq: LiouvilleSequence, length: int) -> LiouvilleSequence:
    """Regenerate a recurrence sequence with at least ``length`` entries.

    User sequences are finite and come back unchanged.
    """
    if seq.kind == "user_supplied" or seq.length >= length:
        return seq
    extended = make_sequence(seq.kind, length=length)
    logger.debug(f"Extended {seq.kind} from {seq.length} to {length} entries")
    return extended.model_copy(update={"audited_through": seq.audited_through})


def with_audit(seq: LiouvilleSequence, i_max: int) -> LiouvilleSequence:
    """Copy of ``seq`` recording that it has been audited through ``i_max``."""
    return seq.model_copy(update={"audited_through": max(seq.audited_through, i_max)})


# ==================== COEFFICIENTS ====================

def coefficient(seq: LiouvilleSequence, i: int, prec: int = PRECISION_BITS) -> ExtendedComplex:
    """1/a_i, exact for powers of two and correctly rounded otherwise.

    Raises:
        InvalidIndex: If i < 1 or beyond the sequence.
    """
    _check_index(seq, i)
    ctx = get_context(prec)
    if seq.is_power_of_two(i):
        return ctx.mpc(ctx.ldexp(seq.signs[i - 1], -seq.log2_magnitudes[i - 1]))
    return ctx.mpc(exact_ratio(ctx, Fraction(1, seq.values[i - 1])))


def coefficients(
    seq: LiouvilleSequence,
    d: int,
    eps: Any = 0,
    g: Sequence[Any] = (),
    prec: int = PRECISION_BITS,
) -> list[ExtendedComplex]:
    """Ascending coefficients of H_{d,eps}(x) + x^d g(x).

    The list is [0, 1/a_1, ..., 1/a_d] followed by eps (when nonzero) in slot
    d+1, then g shifted by d. H_{d, 1/a_{d+1}} and H_{d+1} therefore get the
    same list, so their Horner evaluations agree bit for bit.
    """
    if d < 0:
        raise InvalidIndex(f"Degree must be >= 0, got {d}")
    ctx = get_context(prec)
    coeffs = [ctx.mpc(0)] + [coefficient(seq, i, prec) for i in range(1, d + 1)]
    eps = to_complex(ctx, eps)
    if eps != 0:
        coeffs.append(eps)
    for j, g_j in enumerate(g):
        g_j = to_complex(ctx, g_j)
        if g_j == 0:
            continue
        while len(coeffs) <= d + j:
            coeffs.append(ctx.mpc(0))
        coeffs[d + j] = coeffs[d + j] + g_j
    return coeffs


def horner(ctx: Any, coeffs: list[ExtendedComplex], x: ExtendedComplex) -> tuple[Any, Any]:
    """Value and derivative of sum coeffs[k] x^k (ascending list)."""
    value, derivative = ctx.polyval(coeffs[::-1], x, derivative=True)
    return ctx.mpc(value), ctx.mpc(derivative)


def eval_partial_sum(
    seq: LiouvilleSequence, d: int, eps: Any, x: Any, prec: int = PRECISION_BITS
) -> ExtendedComplex:
    """H_{d,eps}(x) = sum_{i<=d} x^i/a_i + eps x^(d+1) by Horner's rule."""
    ctx = get_context(prec)
    return horner(ctx, coefficients(seq, d, eps, prec=prec), to_complex(ctx, x))[0]


def eval_partial_sum_derivative(
    seq: LiouvilleSequence, d: int, eps: Any, x: Any, prec: int = PRECISION_BITS
) -> ExtendedComplex:
    """H'_{d,eps}(x) = sum i x^(i-1)/a_i + (d+1) eps x^d."""
    ctx = get_context(prec)
    return horner(ctx, coefficients(seq, d, eps, prec=prec), to_complex(ctx, x))[1]


def eval_modified_partial_sum(
    seq: LiouvilleSequence, k: int, g: Sequence[Any], x: Any, prec: int = PRECISION_BITS
) -> ExtendedComplex:
    """H_k(x) + x^k g(x), with g given by ascending coefficients."""
    ctx = get_context(prec)
    return horner(ctx, coefficients(seq, k, 0, g, prec=prec), to_complex(ctx, x))[0]


# ==================== EXACT MODE ====================

def _exact_coefficients(
    seq: LiouvilleSequence, d: int, eps: Any = 0, g: Sequence[Any] = ()
) -> list[GaussianRational]:
    if d < 0:
        raise InvalidIndex(f"Degree must be >= 0, got {d}")
    coeffs = [GaussianRational()]
    coeffs += [GaussianRational(Fraction(1, materialize(seq, i))) for i in range(1, d + 1)]
    coeffs.append(GaussianRational.of(eps))
    for j, g_j in enumerate(g):
        while len(coeffs) <= d + j:
            coeffs.append(GaussianRational())
        coeffs[d + j] = coeffs[d + j] + GaussianRational.of(g_j)
    return coeffs


def _exact_horner(coeffs: list[GaussianRational], x: GaussianRational) -> GaussianRational:
    value = GaussianRational()
    for c in reversed(coeffs):
        value = value * x + c
    return value


def eval_partial_sum_exact(seq: LiouvilleSequence, d: int, eps: Any, x: Any) -> GaussianRational:
    """Exact H_{d,eps}(x) over the Gaussian rationals.

    Raises:
        InvalidIndex: If some a_i with i <= d exceeds the materialization cap.
    """
    return _exact_horner(_exact_coefficients(seq, d, eps), GaussianRational.of(x))


def eval_modified_partial_sum_exact(
    seq: LiouvilleSequence, k: int, g: Sequence[Any], x: Any
) -> GaussianRational:
    """Exact H_k(x) + x^k g(x)."""
    return _exact_horner(_exact_coefficients(seq, k, 0, g), GaussianRational.of(x))


# ==================== TAIL BOUND ====================

def _term_upper(ctx: Any, seq: LiouvilleSequence, i: int, R: Any) -> Any:
    """Upper bound on R^i / |a_i|."""
    if seq.is_power_of_two(i):
        inverse = ctx.ldexp(ctx.one, -seq.log2_magnitudes[i - 1])
    else:
        inverse = ctx.fdiv(1, abs(seq.values[i - 1]), rounding="u")
    return mul_up(ctx, pow_up(ctx, R, i), inverse)


def tail_bound(
    seq: LiouvilleSequence,
    d: int,
    R: Any,
    m: int = TAIL_PROBE_COUNT,
    prec: int = PRECISION_BITS,
) -> Any:
    """Certified upper bound on sup_{|x| <= R} |H(x) - H_d(x)|.

    With t_i = R^i/|a_i|, checks t_{i+1}/t_i <= 1/2 for the probed terms and
    that the same ratio keeps holding past them, then returns
    sum_{i=d+1}^{d+m-1} t_i + 2 t_{d+m}. Everything is rounded upward.

    A user sequence is finite; its series ends at the last supplied index.

    Args:
        seq: Coefficient sequence.
        d: Truncation degree (d >= 0).
        R: Disc radius (R >= 0).
        m: Number of explicit terms (m >= 2).
        prec: Working precision in bits.

    Returns:
        Non-negative mpf upper bound.

    Raises:
        RatioTestFailed: If some ratio exceeds 1/2; ``index`` names the term.
        InvalidIndex: If d < 0 or the sequence is too short for d + m terms.
    """
    ctx = get_context(prec)
    R = ctx.fadd(R, 0, rounding="u")
    if R < 0:
        raise ValueError(f"Radius must be non-negative, got {R}")
    if m < 2:
        raise ValueError(f"Probe count must be at least 2, got {m}")
    if d < 0:
        raise InvalidIndex(f"Degree must be >= 0, got {d}")
    if R == 0:
        return ctx.zero

    last = d + m
    if seq.kind == "user_supplied":
        last = min(last, seq.length)
        if d >= seq.length:
            return ctx.zero
    elif last + 1 > seq.length:
        raise InvalidIndex(f"Tail bound at degree {d} needs a_{last + 1}; length is {seq.length}")

    half = ctx.mpf(0.5)
    for i in range(max(d, 1), last):
        ratio = mul_up(ctx, R, ctx.ldexp(ctx.one, seq.log2_upper[i - 1] - seq.log2_magnitudes[i]))
        if ratio > half:
            logger.debug(f"Ratio test failed at term {i + 1} (ratio {ctx.nstr(ratio, 5)})")
            raise RatioTestFailed(
                f"t_{i + 1}/t_{i} = {ctx.nstr(ratio, 5)} exceeds 1/2 at R = {ctx.nstr(R, 8)}",
                index=i + 1,
            )

    # The geometric majorant needs the ratio to stay <= 1/2 past the probes.
    k_R = ceil_log2(ctx, R)
    if seq.kind == "user_supplied":
        continuation = range(last, seq.length)
    else:
        # Both recurrences have gaps growing faster than i * k_R, so one
        # index suffices.
        continuation = range(last, last + 1)
    for i in continuation:
        gap = seq.log2_magnitudes[i] - seq.log2_upper[i - 1]
        if gap <= max(k_R, i * k_R) + 1:
            raise RatioTestFailed(
                f"Coefficient gap {gap} at index {i} too small for R = {ctx.nstr(R, 8)}",
                index=i + 1,
            )

    if seq.kind == "user_supplied" and last == seq.length:
        # Finite series: every remaining term is listed
        terms = [_term_upper(ctx, seq, i, R) for i in range(d + 1, last + 1)]
    else:
        terms = [_term_upper(ctx, seq, i, R) for i in range(d + 1, last)]
        terms.append(mul_up(ctx, _term_upper(ctx, seq, last, R), 2))
    return sum_up(ctx, terms)
