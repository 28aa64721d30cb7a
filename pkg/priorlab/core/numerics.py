"""Grids, quadrature rules and Shannon-information primitives.

Everything downstream (models, priors, inference) evaluates densities on a
``Grid`` and integrates them with its weights. Grids carry the exact distance
of every node to both endpoints so that densities with integrable endpoint
singularities can be evaluated without the cancellation in ``1 - p``.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, FrozenSet, Optional, Tuple, Union

import numpy as np
from scipy.special import expit, rel_entr, roots_legendre, xlogy

from priorlab.exceptions import (
    DomainError,
    GridError,
    IntegrationError,
    NonFiniteValueError,
    SupportError,
)

logger = logging.getLogger(__name__)

LOWER = "lower"
UPPER = "upper"

MIDPOINT = "midpoint"
GAUSS_LEGENDRE = "gauss_legendre"
TANH_SINH = "tanh_sinh"
SCHEMES = (MIDPOINT, GAUSS_LEGENDRE, TANH_SINH)

STANDARD = "standard"
STRICT = "strict"

DEFAULT_GRID_SIZE = 2048
DEFAULT_REL_TOL = 1e-9
MAX_NODES = 2 ** 22
INITIAL_NODES = 16
ABS_TOL_FLOOR = 1e-12
NORMALIZATION_TOL = 1e-8

# Half-width of the double-exponential window; the outermost node sits about
# exp(-pi * sinh(4)) ~ 1e-37 (relative) away from its endpoint.
TANH_SINH_T_MAX = 4.0


@dataclass(frozen=True)
class ParamDomain:
    """A real interval with open/closed ends and singularity annotations.

    ``singular_endpoints`` lists the ends ("lower", "upper") at which
    integrands may diverge integrably; such ends must be open.
    """

    lower: float
    upper: float
    lower_open: bool = False
    upper_open: bool = False
    singular_endpoints: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "singular_endpoints", frozenset(self.singular_endpoints))
        if np.isnan(self.lower) or np.isnan(self.upper) or not self.lower < self.upper:
            raise DomainError(f"domain requires lower < upper, got [{self.lower}, {self.upper}]")
        unknown = self.singular_endpoints - {LOWER, UPPER}
        if unknown:
            raise DomainError(f"unknown singular endpoint labels: {sorted(unknown)}")
        if LOWER in self.singular_endpoints and not self.lower_open:
            raise DomainError("a singular lower endpoint must be open")
        if UPPER in self.singular_endpoints and not self.upper_open:
            raise DomainError("a singular upper endpoint must be open")

    @classmethod
    def closed(cls, lower: float, upper: float) -> "ParamDomain":
        return cls(lower, upper)

    @classmethod
    def open_singular(cls, lower: float, upper: float) -> "ParamDomain":
        """Open interval whose two endpoints are both integrable singularities."""
        return cls(lower, upper, True, True, frozenset({LOWER, UPPER}))

    @property
    def length(self) -> float:
        return self.upper - self.lower

    @property
    def is_finite(self) -> bool:
        return bool(np.isfinite(self.lower) and np.isfinite(self.upper))

    def gaps(self, theta) -> Tuple[np.ndarray, np.ndarray]:
        """Distances of ``theta`` to the lower and upper endpoints."""
        theta = np.asarray(theta, dtype=float)
        return theta - self.lower, self.upper - theta

    def contains(self, theta) -> np.ndarray:
        """Elementwise membership test honouring open/closed ends."""
        theta = np.asarray(theta, dtype=float)
        above = theta > self.lower if self.lower_open else theta >= self.lower
        below = theta < self.upper if self.upper_open else theta <= self.upper
        return above & below

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "lower_open": self.lower_open,
            "upper_open": self.upper_open,
            "singular_endpoints": sorted(self.singular_endpoints),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ParamDomain":
        return cls(
            float(data["lower"]),
            float(data["upper"]),
            bool(data.get("lower_open", False)),
            bool(data.get("upper_open", False)),
            frozenset(data.get("singular_endpoints", ())),
        )


UNIT_INTERVAL = ParamDomain.closed(0.0, 1.0)


@dataclass(frozen=True, eq=False)
class Grid:
    """Quadrature nodes and weights over a ParamDomain.

    ``lower_gaps``/``upper_gaps`` hold the exact node-to-endpoint distances.
    Near an endpoint, distinct nodes may round to the same double (and are
    clamped strictly inside the domain); the gap arrays stay strictly
    monotone and are what endpoint-aware functions receive.
    """

    nodes: np.ndarray
    weights: np.ndarray
    domain: ParamDomain
    lower_gaps: np.ndarray
    upper_gaps: np.ndarray
    scheme: str

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def step(self) -> float:
        """Lattice step of the underlying rule (t-space step for tanh-sinh)."""
        n = len(self.nodes)
        if self.scheme == TANH_SINH:
            return 2.0 * TANH_SINH_T_MAX / n
        return self.domain.length / n

    def same_as(self, other: "Grid") -> bool:
        if other is self:
            return True
        return (
            len(other) == len(self)
            and self.domain == other.domain
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )


@lru_cache(maxsize=32)
def _unit_rule(scheme: str, n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reference rule on an interval of unit length: (lower gaps, upper gaps, weights)."""
    if scheme == MIDPOINT:
        k = np.arange(n, dtype=float)
        lower = (k + 0.5) / n
        upper = (n - k - 0.5) / n
        weights = np.full(n, 1.0 / n)
    elif scheme == GAUSS_LEGENDRE:
        x, w = roots_legendre(n)
        lower = 0.5 * (1.0 + x)
        upper = 0.5 * (1.0 - x)
        weights = 0.5 * w
    elif scheme == TANH_SINH:
        h = 2.0 * TANH_SINH_T_MAX / n
        t = (np.arange(n, dtype=float) - 0.5 * (n - 1)) * h
        s = 0.5 * np.pi * np.sinh(t)
        # x = expit(2s) on [0, 1]; both gaps come from the logistic form directly
        lower = expit(2.0 * s)
        upper = expit(-2.0 * s)
        weights = h * np.pi * np.cosh(t) * lower * upper
    else:
        raise GridError(f"unknown quadrature scheme {scheme!r}; expected one of {SCHEMES}")
    for arr in (lower, upper, weights):
        arr.setflags(write=False)
    return lower, upper, weights


def build_grid(
    domain: ParamDomain,
    n: int = DEFAULT_GRID_SIZE,
    scheme: str = TANH_SINH,
    accuracy: str = STANDARD,
) -> Grid:
    """
    Build a quadrature grid on a finite domain.

    Args:
        domain: Parameter domain
        n: Number of nodes (>= 2)
        scheme: One of "midpoint", "gauss_legendre", "tanh_sinh"
        accuracy: "standard", or "strict" to demand tanh-sinh on singular domains

    Returns:
        Grid whose nodes lie strictly inside the domain
    """
    if int(n) != n or n < 2:
        raise GridError(f"grid size must be an integer >= 2, got {n!r}")
    n = int(n)
    if scheme not in SCHEMES:
        raise GridError(f"unknown quadrature scheme {scheme!r}; expected one of {SCHEMES}")
    if accuracy not in (STANDARD, STRICT):
        raise GridError(f"unknown accuracy tier {accuracy!r}")
    if not domain.is_finite:
        raise GridError("grids require a finite domain")
    if accuracy == STRICT and domain.singular_endpoints and scheme != TANH_SINH:
        raise GridError(
            f"scheme {scheme!r} cannot resolve the singular endpoints "
            f"{sorted(domain.singular_endpoints)} at accuracy tier 'strict'; use tanh_sinh"
        )

    unit_lower, unit_upper, unit_weights = _unit_rule(scheme, n)
    length = domain.length
    lower_gaps = length * unit_lower
    upper_gaps = length * unit_upper
    weights = length * unit_weights

    nodes = np.where(lower_gaps <= upper_gaps, domain.lower + lower_gaps, domain.upper - upper_gaps)
    nodes = np.clip(
        nodes,
        np.nextafter(domain.lower, domain.upper),
        np.nextafter(domain.upper, domain.lower),
    )
    logger.debug("built %s grid with %d nodes on [%g, %g]", scheme, n, domain.lower, domain.upper)
    return Grid(nodes, weights, domain, lower_gaps, upper_gaps, scheme)


@dataclass(frozen=True)
class EndpointFunction:
    """A function of (theta, lower_gap, upper_gap) bound to a domain.

    Called with ``theta`` alone it derives the gaps from ``theta``; on a grid it
    receives the grid's exact gap arrays.
    """

    fn: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    domain: ParamDomain

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        lower_gap, upper_gap = self.domain.gaps(theta)
        values = np.asarray(self.fn(theta, lower_gap, upper_gap), dtype=float)
        return np.broadcast_to(values, theta.shape).copy()

    def on_grid(self, grid: Grid) -> np.ndarray:
        """Values at the grid nodes; the grid may cover a sub-interval of the domain."""
        inner = grid.domain
        if inner.lower < self.domain.lower or inner.upper > self.domain.upper:
            raise DomainError(
                f"grid on [{inner.lower}, {inner.upper}] extends outside "
                f"[{self.domain.lower}, {self.domain.upper}]"
            )
        lower_gaps = grid.lower_gaps + (inner.lower - self.domain.lower)
        upper_gaps = grid.upper_gaps + (self.domain.upper - inner.upper)
        values = np.asarray(self.fn(grid.nodes, lower_gaps, upper_gaps), dtype=float)
        return np.broadcast_to(values, grid.nodes.shape).copy()

    def scaled(self, factor: float) -> "EndpointFunction":
        fn = self.fn
        return EndpointFunction(lambda t, lo, up: factor * fn(t, lo, up), self.domain)

    @classmethod
    def plain(cls, fn: Callable[[np.ndarray], np.ndarray], domain: ParamDomain) -> "EndpointFunction":
        """Wrap a function of theta alone."""
        return cls(lambda t, lo, up: fn(t), domain)


@dataclass(frozen=True, eq=False)
class GriddedDensity:
    """Nonnegative values of a density at the nodes of a grid."""

    grid: Grid
    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise ValueError(f"expected {len(self.grid)} values, got shape {values.shape}")
        _require_finite(values, self.grid, "density")
        if np.any(values < 0):
            idx = int(np.argmax(values < 0))
            raise ValueError(f"density is negative at node {self.grid.nodes[idx]!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.normalized:
            total = float(np.sum(self.grid.weights * values))
            if abs(total - 1.0) > NORMALIZATION_TOL:
                raise ValueError(f"density flagged normalized integrates to {total!r}")

    @classmethod
    def from_values(cls, grid: Grid, values) -> "GriddedDensity":
        """Normalize raw node values into a density."""
        values = np.asarray(values, dtype=float)
        total = integrate(values, grid)
        if not total > 0:
            raise ValueError("cannot normalize a density with zero mass")
        return cls(grid, values / total, normalized=True)

    def total(self) -> float:
        return integrate(self.values, self.grid)

    def normalize(self) -> "GriddedDensity":
        return GriddedDensity.from_values(self.grid, self.values)


Integrand = Union[GriddedDensity, EndpointFunction, np.ndarray, Callable[[np.ndarray], np.ndarray]]


def _require_finite(values: np.ndarray, grid: Grid, context: str) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise NonFiniteValueError(float(grid.nodes[idx]), float(values[idx]), context)


def evaluate(f: Integrand, grid: Grid) -> np.ndarray:
    """Values of an integrand at the grid nodes."""
    if isinstance(f, GriddedDensity):
        if not f.grid.same_as(grid):
            raise GridError("gridded density lives on a different grid")
        return f.values
    if isinstance(f, EndpointFunction):
        return f.on_grid(grid)
    if isinstance(f, np.ndarray):
        if f.shape != grid.nodes.shape:
            raise GridError(f"expected {len(grid)} node values, got shape {f.shape}")
        return f.astype(float, copy=False)
    if callable(f):
        values = np.asarray(f(grid.nodes), dtype=float)
        return np.broadcast_to(values, grid.nodes.shape)
    raise TypeError(f"cannot integrate object of type {type(f).__name__}")


def integrate(f: Integrand, grid: Grid) -> float:
    """
    Apply the grid's quadrature rule to an integrand.

    Args:
        f: Gridded density, endpoint-aware function, node values or callable
        grid: Quadrature grid

    Returns:
        Sum of weight_i * f(node_i), accumulated by numpy's pairwise summation
    """
    values = evaluate(f, grid)
    _require_finite(values, grid, "integrand")
    return float(np.sum(grid.weights * values))


def endpoint_leakage(values: np.ndarray, grid: Grid) -> float:
    """
    Relative size of the integrand at the outermost nodes.

    On a tanh-sinh grid this is the t-space integrand at the window edges over
    the integral; it stays near zero only when the integrand decays toward the
    endpoints fast enough to be integrable within the window. On other schemes
    it is the outermost node contribution over the integral.
    """
    contributions = grid.weights * values
    total = abs(float(np.sum(contributions)))
    edge = max(abs(float(contributions[0])), abs(float(contributions[-1])))
    if grid.scheme == TANH_SINH:
        edge /= grid.step
    if total == 0.0:
        return 0.0 if edge == 0.0 else float("inf")
    return edge / total


def adaptive_integrate(
    f: Integrand,
    domain: ParamDomain,
    rel_tol: float = DEFAULT_REL_TOL,
    max_nodes: int = MAX_NODES,
) -> float:
    """
    Integrate by doubling the node count until successive estimates agree.

    Domains with singular endpoints use tanh-sinh; others use Gauss-Legendre.

    Args:
        f: Callable or endpoint-aware function
        domain: Finite integration domain
        rel_tol: Relative change threshold in (0, 1e-2]
        max_nodes: Refinement cap

    Returns:
        Integral estimate

    Raises:
        IntegrationError: No convergence within the cap, or (tanh-sinh) the
            integrand does not decay at the endpoints
    """
    if not 0.0 < rel_tol <= 1e-2:
        raise ValueError(f"rel_tol must lie in (0, 1e-2], got {rel_tol!r}")
    scheme = TANH_SINH if domain.singular_endpoints else GAUSS_LEGENDRE

    n = INITIAL_NODES
    previous: Optional[float] = None
    achieved = float("inf")
    while n <= max_nodes:
        grid = build_grid(domain, n, scheme)
        values = evaluate(f, grid)
        _require_finite(values, grid, "integrand")
        estimate = float(np.sum(grid.weights * values))

        if scheme == TANH_SINH:
            leakage = endpoint_leakage(values, grid)
            if leakage * abs(estimate) > max(rel_tol * abs(estimate), ABS_TOL_FLOOR):
                raise IntegrationError(
                    "integrand does not decay at the domain endpoints",
                    estimate,
                    leakage,
                    n,
                )

        if previous is not None:
            change = abs(estimate - previous)
            achieved = change / abs(estimate) if estimate != 0.0 else change
            logger.debug("adaptive %s n=%d estimate=%.17g change=%.3g", scheme, n, estimate, change)
            if change <= max(rel_tol * abs(estimate), ABS_TOL_FLOOR):
                return estimate
        previous = estimate
        n *= 2

    raise IntegrationError("adaptive quadrature did not converge", previous, achieved, n // 2)


def integrate_product(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    grid_x: Grid,
    grid_y: Grid,
) -> float:
    """Tensor-product rule of two one-dimensional grids."""
    xx, yy = np.meshgrid(grid_x.nodes, grid_y.nodes, indexing="ij")
    values = np.asarray(f(xx, yy), dtype=float)
    if not np.all(np.isfinite(values)):
        i, j = np.unravel_index(int(np.argmax(~np.isfinite(values))), values.shape)
        raise NonFiniteValueError(float(grid_x.nodes[i]), float(values[i, j]), "integrand")
    return float(np.sum(np.outer(grid_x.weights, grid_y.weights) * values))


def _require_normalized(f: GriddedDensity, name: str) -> None:
    total = f.total()
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ValueError(f"{name} must be normalized (integrates to {total!r})")


def shannon_neg_entropy(f: GriddedDensity) -> float:
    """Integral of f ln f over the grid, with 0 ln 0 = 0."""
    _require_normalized(f, "density")
    return float(np.sum(f.grid.weights * xlogy(f.values, f.values)))


def kl_divergence(g: GriddedDensity, h: GriddedDensity) -> float:
    """
    Kullback-Leibler divergence of g from h on a shared grid.

    Args:
        g: Normalized density
        h: Normalized reference density, positive wherever g is

    Returns:
        Integral of g ln(g / h), nonnegative up to rounding
    """
    if not g.grid.same_as(h.grid):
        raise GridError("kl_divergence requires both densities on the same grid")
    _require_normalized(g, "g")
    _require_normalized(h, "h")
    violation = (g.values > 0) & (h.values <= 0)
    if np.any(violation):
        idx = int(np.argmax(violation))
        raise SupportError(float(g.grid.nodes[idx]), "g is positive where h vanishes")
    return float(np.sum(g.grid.weights * rel_entr(g.values, h.values)))
