"""Sparse polynomial maps F: C^n x C^n x C^r -> C^n and their compositions.

Component polynomials are lists of terms with exact Gaussian-rational
coefficients. A ComposedSystem substitutes y_i = H_{d,eps}(x_i) (optionally
plus x_i^d g(x_i)) and fixes the parameters, giving a square system in x.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterable, Mapping, Sequence

from .config import PRECISION_BITS
from .exceptions import DimensionMismatch, InvalidIndex, InvalidSystem
from .liouville import coefficients, horner
from .models import LiouvilleSequence
from .numeric import (
    ExtendedComplex,
    GaussianRational,
    abs_up,
    add_up,
    complex_matrix,
    get_context,
    inflate,
    mul_up,
    pow_up,
    to_complex,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Term:
    """coefficient * x^x_exp * y^y_exp * z^z_exp."""

    coefficient: GaussianRational
    x: tuple[int, ...]
    y: tuple[int, ...]
    z: tuple[int, ...] = ()

    @property
    def key(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        return (self.x, self.y, self.z)

    @property
    def total_degree(self) -> int:
        return sum(self.x) + sum(self.y) + sum(self.z)


def _pad(exponents: Sequence[int] | None, size: int, label: str) -> tuple[int, ...]:
    exponents = tuple(int(e) for e in (exponents or ()))
    if len(exponents) > size:
        raise InvalidSystem(f"{label}-exponent vector {exponents} longer than {size}")
    if any(e < 0 for e in exponents):
        raise InvalidSystem(f"Negative {label}-exponent in {exponents}")
    return exponents + (0,) * (size - len(exponents))


@dataclass(frozen=True)
class PolynomialMap:
    """n component polynomials in x (n), y (n) and parameters z (r).

    Always canonical: no duplicate exponent triples, no zero coefficients,
    terms sorted by total degree. Build through :meth:`from_terms`.
    """

    n: int
    r: int
    components: tuple[tuple[Term, ...], ...]

    @classmethod
    def from_terms(
        cls, n: int, r: int, components: Iterable[Iterable[Term | Mapping[str, Any]]]
    ) -> "PolynomialMap":
        """Canonicalize raw terms into a PolynomialMap.

        Args:
            n: Size of the x and y blocks.
            r: Number of parameters.
            components: One iterable of terms per component. Terms may be
                :class:`Term` instances or mappings with keys
                "coefficient", "x", "y", "z" (missing vectors are zero).

        Raises:
            InvalidSystem: On a wrong component count or bad exponents.
        """
        if n < 1 or r < 0:
            raise InvalidSystem(f"Need n >= 1 and r >= 0, got n={n}, r={r}")
        canonical = []
        for raw_terms in components:
            merged: dict[tuple, GaussianRational] = {}
            for raw in raw_terms:
                if isinstance(raw, Term):
                    coeff, xs, ys, zs = raw.coefficient, raw.x, raw.y, raw.z
                else:
                    coeff = raw.get("coefficient", 1)
                    xs, ys, zs = raw.get("x"), raw.get("y"), raw.get("z")
                key = (_pad(xs, n, "x"), _pad(ys, n, "y"), _pad(zs, r, "z"))
                merged[key] = merged.get(key, GaussianRational()) + GaussianRational.of(coeff)
            terms = [
                Term(coefficient=c, x=k[0], y=k[1], z=k[2])
                for k, c in merged.items()
                if not c.is_zero
            ]
            terms.sort(key=lambda t: (t.total_degree, t.key))
            canonical.append(tuple(terms))
        if len(canonical) != n:
            raise InvalidSystem(f"Expected {n} components, got {len(canonical)}")
        return cls(n=n, r=r, components=tuple(canonical))

    @property
    def degree(self) -> int:
        return max((t.total_degree for comp in self.components for t in comp), default=0)

    def uses_y(self) -> bool:
        return any(any(t.y) for comp in self.components for t in comp)


# ==================== EVALUATION ====================

def _check_dims(F: PolynomialMap, x: Sequence, y: Sequence, z: Sequence) -> None:
    if len(x) != F.n or len(y) != F.n or len(z) != F.r:
        raise DimensionMismatch(
            f"Expected x, y of length {F.n} and z of length {F.r}; "
            f"got {len(x)}, {len(y)}, {len(z)}"
        )


def monomial(ctx: Any, values: Sequence[Any], exponents: tuple[int, ...]) -> Any:
    result = ctx.mpc(1)
    for v, e in zip(values, exponents):
        if e:
            result *= v**e
    return result


def _eval_terms(ctx: Any, terms: Sequence[Term], x: list, y: list, z: list) -> Any:
    values = [
        to_complex(ctx, t.coefficient)
        * monomial(ctx, x, t.x)
        * monomial(ctx, y, t.y)
        * monomial(ctx, z, t.z)
        for t in terms
    ]
    # fsum rounds once; smallest-first order keeps the result order-independent
    values.sort(key=abs)
    return ctx.mpc(ctx.fsum(values)) if values else ctx.mpc(0)


def evaluate(
    F: PolynomialMap, x: Sequence[Any], y: Sequence[Any], z: Sequence[Any] = (),
    prec: int = PRECISION_BITS,
) -> list[ExtendedComplex]:
    """F(x, y, z) componentwise.

    Raises:
        DimensionMismatch: If the vector sizes do not match F.
    """
    _check_dims(F, x, y, z)
    ctx = get_context(prec)
    x, y, z = ([to_complex(ctx, v) for v in vec] for vec in (x, y, z))
    return [_eval_terms(ctx, comp, x, y, z) for comp in F.components]


def evaluate_exact(
    F: PolynomialMap, x: Sequence[Any], y: Sequence[Any], z: Sequence[Any] = ()
) -> list[GaussianRational]:
    """F(x, y, z) over the Gaussian rationals (no rounding)."""
    _check_dims(F, x, y, z)
    x, y, z = ([GaussianRational.of(v) for v in vec] for vec in (x, y, z))
    results = []
    for comp in F.components:
        total = GaussianRational()
        for t in comp:
            value = t.coefficient
            for vec, exps in ((x, t.x), (y, t.y), (z, t.z)):
                for v, e in zip(vec, exps):
                    if e:
                        value = value * v**e
            total = total + value
        results.append(total)
    return results


@lru_cache(maxsize=256)
def partial_terms(F: PolynomialMap, block: str, j: int) -> tuple[tuple[Term, ...], ...]:
    """Exact partial derivative of every component w.r.t. x_j or y_j (0-based j)."""
    if block not in ("x", "y"):
        raise ValueError(f"block must be 'x' or 'y', got {block!r}")
    result = []
    for comp in F.components:
        terms = []
        for t in comp:
            exps = getattr(t, block)
            e = exps[j]
            if e == 0:
                continue
            lowered = exps[:j] + (e - 1,) + exps[j + 1:]
            coeff = t.coefficient * e
            if block == "x":
                terms.append(Term(coeff, lowered, t.y, t.z))
            else:
                terms.append(Term(coeff, t.x, lowered, t.z))
        result.append(tuple(terms))
    return tuple(result)


def jacobian(
    F: PolynomialMap, x: Sequence[Any], y: Sequence[Any], z: Sequence[Any] = (),
    prec: int = PRECISION_BITS,
) -> Any:
    """The n x 2n Jacobian [dF/dx | dF/dy] as an mpmath matrix."""
    _check_dims(F, x, y, z)
    ctx = get_context(prec)
    x, y, z = ([to_complex(ctx, v) for v in vec] for vec in (x, y, z))
    J = complex_matrix(ctx, F.n, 2 * F.n)
    for offset, block in ((0, "x"), (F.n, "y")):
        for j in range(F.n):
            for k, comp in enumerate(partial_terms(F, block, j)):
                J[k, offset + j] = _eval_terms(ctx, comp, x, y, z)
    return J


# ==================== COMPOSITION ====================

@dataclass(frozen=True)
class ComposedSystem:
    """x -> F(x, H_{d,eps}(x) + x^d g(x), z) with H applied componentwise."""

    F: PolynomialMap
    z: tuple[Any, ...]
    seq: LiouvilleSequence
    d: int
    eps: Any = 0
    g: tuple[Any, ...] = ()
    prec: int = PRECISION_BITS

    def __post_init__(self) -> None:
        if len(self.z) != self.F.r:
            raise DimensionMismatch(f"Expected {self.F.r} parameters, got {len(self.z)}")
        if self.d < 0:
            raise InvalidIndex(f"Degree must be >= 0, got {self.d}")
        object.__setattr__(self, "z", tuple(self.z))
        object.__setattr__(self, "g", tuple(self.g))

    @property
    def n(self) -> int:
        return self.F.n

    def inner_coefficients(self) -> list[ExtendedComplex]:
        """Ascending coefficients of the univariate inner function."""
        return coefficients(self.seq, self.d, self.eps, self.g, prec=self.prec)

    def inner(self, x: Sequence[Any]) -> tuple[list[Any], list[Any]]:
        """Inner values y_i and derivatives at each x_i."""
        ctx = get_context(self.prec)
        coeffs = self.inner_coefficients()
        pairs = [horner(ctx, coeffs, to_complex(ctx, v)) for v in x]
        return [p[0] for p in pairs], [p[1] for p in pairs]


def compose_eval(system: ComposedSystem, x: Sequence[Any]) -> list[ExtendedComplex]:
    """F(x, H_{d,eps}(x), z)."""
    if len(x) != system.n:
        raise DimensionMismatch(f"Expected x of length {system.n}, got {len(x)}")
    y, _ = system.inner(x)
    return evaluate(system.F, x, y, system.z, system.prec)


def compose_jacobian(system: ComposedSystem, x: Sequence[Any]) -> Any:
    """n x n Jacobian dF/dx + dF/dy . diag(H'_{d,eps}(x_i)) (chain rule)."""
    if len(x) != system.n:
        raise DimensionMismatch(f"Expected x of length {system.n}, got {len(x)}")
    ctx = get_context(system.prec)
    n = system.n
    y, dy = system.inner(x)
    full = jacobian(system.F, x, y, system.z, system.prec)
    J = complex_matrix(ctx, n, n)
    for k in range(n):
        for j in range(n):
            J[k, j] = full[k, j] + full[k, n + j] * dy[j]
    return J


def compose_direction_derivative(
    system: ComposedSystem, x: Sequence[Any], direction: Sequence[Any]
) -> list[ExtendedComplex]:
    """d/dt of F(x, p_t(x), z) when the inner coefficients move by t * direction.

    Args:
        system: Composed system at the current coefficients.
        x: Point.
        direction: Ascending coefficient list of the inner-function change.

    Returns:
        (dF/dy) . (delta(x_1), ..., delta(x_n)).
    """
    ctx = get_context(system.prec)
    n = system.n
    y, _ = system.inner(x)
    full = jacobian(system.F, x, y, system.z, system.prec)
    delta = [to_complex(ctx, c) for c in direction]
    shifts = [horner(ctx, delta, to_complex(ctx, v))[0] for v in x] if delta else [ctx.mpc(0)] * n
    return [ctx.fsum(full[k, n + j] * shifts[j] for j in range(n)) for k in range(n)]


def compose_epsilon_derivative(system: ComposedSystem, x: Sequence[Any]) -> list[ExtendedComplex]:
    """dPhi/deps = (dF/dy) . (x_i^(d+1))_i, the Davidenko right-hand side."""
    return compose_direction_derivative(system, x, [0] * (system.d + 1) + [1])


# ==================== BOUNDS AND UNIVARIATE FORM ====================

def y_lipschitz_bound(
    F: PolynomialMap, z: Sequence[Any], rho_x: Any, rho_y: Any, prec: int = PRECISION_BITS
) -> Any:
    """Upper bound on max_k sum_j sup |df_k/dy_j| over |x_i| <= rho_x, |y_j| <= rho_y.

    Computed from coefficient magnitudes with upward rounding; this is the
    infinity-norm Lipschitz constant of F in y on that polydisc.
    """
    if len(z) != F.r:
        raise DimensionMismatch(f"Expected {F.r} parameters, got {len(z)}")
    ctx = get_context(prec)
    rho_x = ctx.fadd(rho_x, 0, rounding="u")
    rho_y = ctx.fadd(rho_y, 0, rounding="u")
    z_abs = [abs_up(ctx, to_complex(ctx, v)) for v in z]
    best = ctx.zero
    for j_comp in range(F.n):
        row = ctx.zero
        for j in range(F.n):
            for t in partial_terms(F, "y", j)[j_comp]:
                bound = abs_up(ctx, to_complex(ctx, t.coefficient))
                bound = mul_up(ctx, bound, pow_up(ctx, rho_x, sum(t.x)))
                bound = mul_up(ctx, bound, pow_up(ctx, rho_y, sum(t.y)))
                for v, e in zip(z_abs, t.z):
                    bound = mul_up(ctx, bound, pow_up(ctx, v, e))
                row = add_up(ctx, row, bound)
        best = max(best, row)
    return best


def _poly_mul(ctx: Any, a: list, b: list) -> list:
    out = [ctx.mpc(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def _poly_pow(ctx: Any, p: list, e: int) -> list:
    result = [ctx.mpc(1)]
    for _ in range(e):
        result = _poly_mul(ctx, result, p)
    return result


def univariate_coefficients(system: ComposedSystem) -> list[ExtendedComplex]:
    """Ascending coefficients in x of F(x, p(x), z) for n = 1.

    Raises:
        InvalidSystem: If the system has more than one variable.
    """
    if system.n != 1:
        raise InvalidSystem(f"Univariate form needs n = 1, got n = {system.n}")
    ctx = get_context(system.prec)
    p = system.inner_coefficients()
    z = [to_complex(ctx, v) for v in system.z]
    total: list = [ctx.mpc(0)]
    powers: dict[int, list] = {}
    for t in system.F.components[0]:
        factor = to_complex(ctx, t.coefficient) * monomial(ctx, z, t.z)
        e_y = t.y[0]
        if e_y not in powers:
            powers[e_y] = _poly_pow(ctx, p, e_y)
        contribution = [ctx.mpc(0)] * t.x[0] + [factor * c for c in powers[e_y]]
        if len(contribution) > len(total):
            total += [ctx.mpc(0)] * (len(contribution) - len(total))
        for i, c in enumerate(contribution):
            total[i] += c
    return total


def residual_upper(ctx: Any, values: Sequence[Any]) -> Any:
    """Upward-rounded infinity norm of a residual vector."""
    return max((inflate(ctx, abs(v)) for v in values), default=ctx.zero)
