"""N_F(z): the smallest modulus of an isolated root of a univariate family.

For n = 1 and F free of y, or for a composed system at a fixed degree, the
roots in x of a nonzero polynomial are all isolated; N_F is their minimum
modulus, and +infinity when F(., z) has no root or vanishes identically.
"""

import logging
from typing import Any, Sequence

from .config import PRECISION_BITS
from .exceptions import DimensionMismatch, InvalidSystem
from .models import SemicontinuityProbe
from .numeric import get_context, to_complex
from .polynomials import ComposedSystem, PolynomialMap, monomial, univariate_coefficients

logger = logging.getLogger(__name__)


def _polynomial_coefficients(F: PolynomialMap, z: Sequence[Any], prec: int) -> list[Any]:
    if F.n != 1:
        raise InvalidSystem(f"N_F needs a univariate family (n = 1), got n = {F.n}")
    if F.uses_y():
        raise InvalidSystem("N_F needs a polynomial in x and z only; compose y first")
    if len(z) != F.r:
        raise DimensionMismatch(f"Expected {F.r} parameters, got {len(z)}")
    ctx = get_context(prec)
    zs = [to_complex(ctx, v) for v in z]
    coeffs = [ctx.mpc(0)] * (F.degree + 1)
    for t in F.components[0]:
        coeffs[t.x[0]] += to_complex(ctx, t.coefficient) * monomial(ctx, zs, t.z)
    return coeffs


def polynomial_roots(ctx: Any, coeffs: Sequence[Any]) -> list[Any]:
    """All roots, with multiplicity, of an ascending coefficient list.

    Leading and trailing exact zeros are stripped first; the remaining
    roots are the eigenvalues of the companion matrix.
    """
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    zeros = 0
    while zeros < len(coeffs) and coeffs[zeros] == 0:
        zeros += 1
    coeffs = coeffs[zeros:]
    roots = [ctx.mpc(0)] * zeros
    degree = len(coeffs) - 1
    if degree < 1:
        return roots
    if degree == 1:
        return roots + [-coeffs[0] / coeffs[1]]

    lead = coeffs[-1]
    C = ctx.matrix(degree, degree)
    for i in range(1, degree):
        C[i, i - 1] = ctx.mpc(1)
    for i in range(degree):
        C[i, degree - 1] = -coeffs[i] / lead
    return roots + list(ctx.eig(C, left=False, right=False))


def min_isolated_root_norm(
    target: PolynomialMap | ComposedSystem,
    z: Sequence[Any] = (),
    prec: int = PRECISION_BITS,
) -> Any:
    """N_F(z) = min |x| over the roots of F(x, z), or +inf if there are none.

    Args:
        target: A univariate PolynomialMap without y, or a ComposedSystem
            with n = 1 (its own parameters are used and ``z`` is ignored).
        z: Parameter values for a PolynomialMap.
        prec: Working precision in bits.

    Raises:
        InvalidSystem: If the family is not univariate in x.
    """
    ctx = get_context(prec)
    if isinstance(target, ComposedSystem):
        coeffs = univariate_coefficients(target)
    else:
        coeffs = _polynomial_coefficients(target, tuple(z), prec)

    roots = polynomial_roots(ctx, coeffs)
    if not roots:
        logger.debug("Polynomial is constant or identically zero; N_F = +inf")
        return ctx.inf
    return min(ctx.mpf(abs(r)) for r in roots)


def semicontinuity_probe(
    F: PolynomialMap,
    z0: Sequence[Any],
    radius: Any,
    points: int = 16,
    prec: int = PRECISION_BITS,
) -> SemicontinuityProbe:
    """Compare N_F(z0) with N_F on an equally spaced circle |z_1 - z0_1| = radius.

    Only the first parameter moves; the others stay at z0. Upper
    semicontinuity predicts the grid maximum stays close to N_F(z0) once
    the radius is small.
    """
    if F.r < 1:
        raise InvalidSystem("Semicontinuity probe needs at least one parameter")
    if points < 1:
        raise ValueError(f"points must be positive, got {points}")
    ctx = get_context(prec)
    center = [to_complex(ctx, v) for v in z0]
    radius = ctx.mpf(radius)

    center_norm = min_isolated_root_norm(F, center, prec)
    norms = []
    for k in range(points):
        zeta = [center[0] + radius * ctx.expjpi(ctx.mpf(2 * k) / points)] + center[1:]
        norms.append(min_isolated_root_norm(F, zeta, prec))
    max_norm = max(norms)
    logger.info(
        f"N_F(z0) = {ctx.nstr(center_norm, 10)}, max on radius {ctx.nstr(radius, 5)}: "
        f"{ctx.nstr(max_norm, 10)}"
    )
    return SemicontinuityProbe(
        z0=center[0], radius=radius, center_norm=center_norm, norms=norms, max_norm=max_norm
    )
