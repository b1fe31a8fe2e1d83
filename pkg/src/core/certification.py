"""Regular, balanced and well-balanced zero certification.

A zero (x, y) of the n equations F_z in 2n unknowns is regular when the
n x 2n Jacobian has rank n, balanced when in addition the x_i are nonzero
and pairwise distinct and some minor over complementary columns x_I, y_J is
nonsingular, and well balanced when the tangent space lies in no hyperplane
x_i = c.
"""

import logging
import random
from itertools import combinations
from typing import Any, Sequence

from .config import MAX_NEWTON_ITERS, PRECISION_BITS
from .exceptions import (
    DimensionMismatch,
    DistinctnessViolated,
    InvalidSystem,
    LiouvilleError,
    NotAZero,
    PrecisionExhausted,
    ZeroPolynomial,
)
from .models import StabilityProbe, Tolerances, Witness, ZeroCertificate
from .newton import newton_iterate
from .numeric import complex_matrix, get_context, norm_inf, singular_values, to_complex
from .polynomials import PolynomialMap, Term, evaluate, jacobian

logger = logging.getLogger(__name__)


def _split_point(F: PolynomialMap, point: Sequence[Any]) -> tuple[list[Any], list[Any]]:
    if len(point) != 2 * F.n:
        raise DimensionMismatch(f"Point must have {2 * F.n} coordinates, got {len(point)}")
    return list(point[: F.n]), list(point[F.n:])


def _resolve(tolerances: Tolerances | None, prec: int) -> Tolerances:
    return tolerances if tolerances is not None else Tolerances.for_precision(prec)


def certify_regular(
    F: PolynomialMap,
    z: Sequence[Any],
    point: Sequence[Any],
    tolerances: Tolerances | None = None,
    prec: int = PRECISION_BITS,
) -> ZeroCertificate:
    """Check the residual and the numerical rank of the Jacobian.

    Args:
        F: Polynomial map.
        z: Parameter values.
        point: (x_1..x_n, y_1..y_n).
        tolerances: Thresholds; defaults scale with ``prec``.
        prec: Working precision in bits.

    Returns:
        Certificate with the ``regular`` flag and singular values.

    Raises:
        NotAZero: If ||F(point, z)||_inf exceeds the residual tolerance.
        PrecisionExhausted: If sigma_n / sigma_1 lies within a factor of 10
            of the rank tolerance.
    """
    tol = _resolve(tolerances, prec)
    ctx = get_context(prec)
    x, y = _split_point(F, point)
    x = [to_complex(ctx, v) for v in x]
    y = [to_complex(ctx, v) for v in y]
    z = [to_complex(ctx, v) for v in z]

    residual = norm_inf(ctx, evaluate(F, x, y, z, prec))
    if residual > tol.value(ctx, "residual_tol"):
        raise NotAZero(f"Residual {ctx.nstr(residual, 5)} exceeds tolerance 2^{tol.residual_tol_log2}")

    sigmas = singular_values(ctx, jacobian(F, x, y, z, prec))
    rank_tol = tol.value(ctx, "rank_rel_tol")
    if sigmas[0] == 0:
        rank = 0
        regular = False
    else:
        ratio = sigmas[-1] / sigmas[0]
        if rank_tol / 10 <= ratio <= rank_tol * 10:
            raise PrecisionExhausted(
                f"sigma_min/sigma_max = {ctx.nstr(ratio, 5)} is too close to 2^{tol.rank_rel_tol_log2}"
            )
        rank = sum(1 for s in sigmas if s / sigmas[0] > rank_tol)
        regular = rank == F.n

    logger.debug(f"Rank {rank} of {F.n}, residual {ctx.nstr(residual, 5)}")
    return ZeroCertificate(
        x=x,
        y=y,
        z=z,
        residual_norm=residual,
        jacobian_rank=rank,
        singular_values=sigmas,
        regular=regular,
        tolerances=tol,
    )


def check_distinct(ctx: Any, x: Sequence[Any], tol: Tolerances) -> None:
    """Raise DistinctnessViolated unless every x_i is nonzero and they are pairwise distinct."""
    dtol = tol.value(ctx, "distinctness_tol")
    for i, xi in enumerate(x, start=1):
        if abs(xi) <= dtol:
            raise DistinctnessViolated(f"x_{i} is zero (|x_{i}| = {ctx.nstr(abs(xi), 5)})")
    for (i, xi), (j, xj) in combinations(enumerate(x, start=1), 2):
        if abs(xi - xj) <= dtol:
            raise DistinctnessViolated(f"x_{i} and x_{j} coincide")


def witness_columns(n: int, I: Sequence[int]) -> list[int]:
    """0-based Jacobian columns of the minor over x_I and y_J, J = complement of I."""
    members = set(I)
    return [k - 1 if k in members else n + k - 1 for k in range(1, n + 1)]


def _minor(ctx: Any, J: Any, columns: Sequence[int]) -> Any:
    M = complex_matrix(ctx, J.rows, len(columns))
    for row in range(J.rows):
        for col, source in enumerate(columns):
            M[row, col] = J[row, source]
    return M


def find_balanced_witness(
    F: PolynomialMap,
    z: Sequence[Any],
    point: Sequence[Any],
    tolerances: Tolerances | None = None,
    prec: int = PRECISION_BITS,
) -> Witness | None:
    """Pick the complementary partition I, J with the largest |det| minor.

    All 2^n subsets I of {1..n} are tried in lexicographic order; a later
    subset replaces the current best only when its |det| is larger by a
    relative margin, so ties go to the lexicographically smallest I.

    Returns:
        The witness, or None when no minor exceeds the det tolerance.

    Raises:
        DistinctnessViolated: If some x_i is zero or two coincide.
    """
    tol = _resolve(tolerances, prec)
    ctx = get_context(prec)
    x, y = _split_point(F, point)
    x = [to_complex(ctx, v) for v in x]
    check_distinct(ctx, x, tol)

    J_full = jacobian(F, x, y, z, prec)
    margin = 1 + ctx.ldexp(ctx.one, -(prec // 2))
    subsets = sorted(
        tuple(c) for size in range(F.n + 1) for c in combinations(range(1, F.n + 1), size)
    )
    best_I: tuple[int, ...] | None = None
    best_det = ctx.zero
    for I in subsets:
        det_abs = abs(ctx.det(_minor(ctx, J_full, witness_columns(F.n, I))))
        if best_I is None or det_abs > best_det * margin:
            best_I, best_det = I, det_abs

    if best_det <= tol.value(ctx, "det_tol"):
        logger.debug(f"No witness minor above 2^{tol.det_tol_log2}")
        return None
    J_set = [k for k in range(1, F.n + 1) if k not in best_I]
    return Witness(I=list(best_I), J=J_set, det_abs=best_det)


def tangent_margins(ctx: Any, J_full: Any, witness: Witness, n: int) -> list[Any]:
    """Norm of each x_i coordinate functional restricted to ker J.

    The kernel is parametrized by the non-witness columns; the row norms of
    an orthonormal kernel basis come from the projector K (K^H K)^-1 K^H.
    """
    columns = witness_columns(n, witness.I)
    free = [c for c in range(2 * n) if c not in columns]
    W = _minor(ctx, J_full, columns)
    N = _minor(ctx, J_full, free)

    K = complex_matrix(ctx, 2 * n, n)
    for k in range(n):
        solved = ctx.lu_solve(W, ctx.matrix([-N[row, k] for row in range(n)]))
        for row, col in enumerate(columns):
            K[col, k] = solved[row]
        K[free[k], k] = ctx.mpc(1)

    gram = K.H * K
    margins = []
    for i in range(n):
        row = ctx.matrix([ctx.conj(K[i, k]) for k in range(n)])
        solved = ctx.lu_solve(gram, row)
        projected = ctx.fsum(K[i, k] * solved[k] for k in range(n))
        margins.append(ctx.sqrt(abs(ctx.re(projected))))
    return margins


def certify_well_balanced(
    F: PolynomialMap,
    z: Sequence[Any],
    point: Sequence[Any],
    tolerances: Tolerances | None = None,
    prec: int = PRECISION_BITS,
) -> ZeroCertificate:
    """Full certificate: regular, then balanced witness, then tangent test.

    Raises:
        NotAZero, PrecisionExhausted: From :func:`certify_regular`.
        DistinctnessViolated: From :func:`find_balanced_witness`.
    """
    tol = _resolve(tolerances, prec)
    cert = certify_regular(F, z, point, tol, prec)
    if not cert.regular:
        return cert

    witness = find_balanced_witness(F, z, point, tol, prec)
    if witness is None:
        return cert

    ctx = get_context(prec)
    J_full = jacobian(F, cert.x, cert.y, cert.z, prec)
    margins = tangent_margins(ctx, J_full, witness, F.n)
    well = all(m > tol.value(ctx, "tangent_tol") for m in margins)
    logger.info(f"Certified balanced zero, witness I={witness.I} J={witness.J}, well balanced: {well}")
    return cert.model_copy(
        update={
            "witness": witness,
            "balanced": True,
            "well_balanced": well,
            "tangent_margins": margins,
        }
    )


# ==================== AUGMENTATION ====================

def _check_partition(n: int, I: Sequence[int], J: Sequence[int]) -> None:
    if sorted(list(I) + list(J)) != list(range(1, n + 1)):
        raise InvalidSystem(f"I={list(I)} and J={list(J)} must partition 1..{n}")


def augment_for_inverse(
    F: PolynomialMap, P: Sequence[Term], I: Sequence[int], J: Sequence[int]
) -> PolynomialMap:
    """G = (f_1, ..., f_n, P(x_I, y_J) y_{n+1} - 1) in n+1 pairs of variables.

    The Jacobian of G has block form [[dF, 0], [dP, P]] in the columns
    (x, y, x_{n+1}, y_{n+1}), so a balanced zero of F with P != 0 extends to
    a balanced zero of G through y_{n+1} = 1/P.

    Args:
        F: Original map.
        P: Terms of P in F's variables, supported on x_I and y_J only.
        I: 1-based x-indices.
        J: 1-based y-indices, complementary to I.

    Raises:
        ZeroPolynomial: If P is zero.
        InvalidSystem: If P uses variables outside x_I, y_J or I, J do not
            partition 1..n.
    """
    _check_partition(F.n, I, J)
    P_map = PolynomialMap.from_terms(F.n, F.r, [P] + [[] for _ in range(F.n - 1)])
    p_terms = P_map.components[0]
    if not p_terms:
        raise ZeroPolynomial("P must be a nonzero polynomial")
    for t in p_terms:
        if any(t.x[k - 1] for k in J) or any(t.y[k - 1] for k in I):
            raise InvalidSystem(f"P term {t.key} uses variables outside x_I, y_J")

    components = [
        [Term(t.coefficient, t.x + (0,), t.y + (0,), t.z) for t in comp]
        for comp in F.components
    ]
    last = [Term(t.coefficient, t.x + (0,), t.y + (1,), t.z) for t in p_terms]
    last.append(Term(-1, (0,) * (F.n + 1), (0,) * (F.n + 1), (0,) * F.r))
    return PolynomialMap.from_terms(F.n + 1, F.r, components + [last])


def extend_zero(
    F: PolynomialMap,
    P: Sequence[Term],
    I: Sequence[int],
    J: Sequence[int],
    point: Sequence[Any],
    z: Sequence[Any],
    x_new: Any,
    tolerances: Tolerances | None = None,
    prec: int = PRECISION_BITS,
) -> list[Any]:
    """Extend a zero of F to the augmented system: (x, x_new, y, 1/P).

    Raises:
        NotAZero: If P vanishes at the point.
        DistinctnessViolated: If x_new is zero or equals some x_i.
    """
    tol = _resolve(tolerances, prec)
    ctx = get_context(prec)
    _check_partition(F.n, I, J)
    x, y = _split_point(F, point)
    x = [to_complex(ctx, v) for v in x]
    y = [to_complex(ctx, v) for v in y]
    x_new = to_complex(ctx, x_new)
    check_distinct(ctx, x + [x_new], tol)

    P_map = PolynomialMap.from_terms(F.n, F.r, [P] + [[] for _ in range(F.n - 1)])
    p_value = evaluate(P_map, x, y, z, prec)[0]
    if abs(p_value) <= tol.value(ctx, "distinctness_tol"):
        raise NotAZero("P vanishes at the point; y_{n+1} = 1/P is undefined")
    return x + [x_new] + y + [1 / p_value]


def degree_bounds(n: int, r: int) -> dict[str, int]:
    """Degree thresholds: inductive n(nr+n+r+1) and finiteness n(r+1)+r."""
    if n < 1 or r < 0:
        raise InvalidSystem(f"Need n >= 1 and r >= 0, got n={n}, r={r}")
    return {"inductive": n * (n * r + n + r + 1), "finiteness": n * (r + 1) + r}


# ==================== PARAMETER STABILITY ====================

def _unit_direction(ctx: Any, rng: random.Random, r: int) -> list[Any]:
    raw = [ctx.mpc(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(r)]
    scale = ctx.sqrt(ctx.fsum(abs(v) ** 2 for v in raw))
    return [v / scale for v in raw]


def probe_parameter_stability(
    F: PolynomialMap,
    z: Sequence[Any],
    point: Sequence[Any],
    radius: Any,
    samples: int = 16,
    tolerances: Tolerances | None = None,
    seed: int = 0,
    prec: int = PRECISION_BITS,
) -> StabilityProbe:
    """Re-solve and re-certify the zero at parameters sampled on |zeta - z| = radius.

    The non-witness coordinates are held fixed (an affine slice through the
    point) and Newton solves the square system in the witness coordinates.
    Reports how many samples stay well balanced; claims no certified radius.

    Raises:
        NotAZero: If the point itself is not a balanced zero.
        DistinctnessViolated, PrecisionExhausted: From certify_well_balanced.
    """
    tol = _resolve(tolerances, prec)
    ctx = get_context(prec)
    base = certify_well_balanced(F, z, point, tol, prec)
    if not base.balanced:
        raise NotAZero("Stability probe needs a balanced zero")

    n = F.n
    columns = witness_columns(n, base.witness.I)
    start = base.x + base.y
    rng = random.Random(seed)
    radius = ctx.mpf(radius)
    probe = StabilityProbe(radius=radius, samples=samples)
    counts = {"converged": 0, "well_balanced": 0, "same_witness": 0}
    min_margin = None

    for _ in range(samples):
        direction = _unit_direction(ctx, rng, F.r)
        zeta = [to_complex(ctx, zi) + radius * u for zi, u in zip(base.z, direction)]

        def fill(w: list[Any]) -> list[Any]:
            full = list(start)
            for value, col in zip(w, columns):
                full[col] = value
            return full

        def residual(w: list[Any]) -> list[Any]:
            full = fill(w)
            return evaluate(F, full[:n], full[n:], zeta, prec)

        def minor(w: list[Any]) -> Any:
            full = fill(w)
            return _minor(ctx, jacobian(F, full[:n], full[n:], zeta, prec), columns)

        try:
            result = newton_iterate(
                ctx,
                residual,
                minor,
                [start[c] for c in columns],
                tol=tol.value(ctx, "newton_tol"),
                max_iters=MAX_NEWTON_ITERS,
                singular_tol=tol.value(ctx, "rank_rel_tol"),
            )
            counts["converged"] += 1
            cert = certify_well_balanced(F, zeta, fill(result.x), tol, prec)
        except LiouvilleError as e:
            logger.debug(f"Stability sample failed: {e}")
            continue
        if cert.well_balanced:
            counts["well_balanced"] += 1
        if cert.witness is not None and cert.witness.I == base.witness.I:
            counts["same_witness"] += 1
        margin = cert.singular_values[-1] / cert.singular_values[0]
        min_margin = margin if min_margin is None else min(min_margin, margin)

    logger.info(
        f"Stability probe at radius {ctx.nstr(radius, 5)}: "
        f"{counts['well_balanced']}/{samples} samples well balanced"
    )
    return probe.model_copy(update={**counts, "min_rank_margin": min_margin})
