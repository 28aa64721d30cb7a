"""Prior measures: point atoms plus a (possibly unnormalized) density.

Every density is an EndpointFunction so that kernels which blow up at the
ends of their domain (Haldane, Jeffreys, arc-sine, the AR(1) kernels) are
evaluated from exact endpoint gaps.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import betaln, xlogy

from priorlab.core.models import (
    AR1Model,
    LikelihoodModel,
    MultinomialModel,
    _require_scalar_parameter,
    data_density_information,
    fisher_information_at,
    information_on,
)
from priorlab.core.numerics import (
    DEFAULT_REL_TOL,
    LOWER,
    UPPER,
    EndpointFunction,
    Grid,
    ParamDomain,
    adaptive_integrate,
)
from priorlab.exceptions import (
    DomainError,
    ImproperMeasureError,
    IntegrationError,
    ModelError,
    NonFiniteValueError,
)

logger = logging.getLogger(__name__)

ATOM_SUM_TOL = 1e-12
# Finite-difference step for the rule prior away from the endpoints.
RULE_FD_STEP = 1e-3

UNIFORM = "uniform"
HALDANE = "haldane"
JEFFREYS = "jeffreys"
MDIP = "mdip"
MIXED = "mixed"
ARCSINE = "arcsine"


@dataclass(frozen=True)
class BetaKernel:
    """scale * p^(a-1) * (1-p)^(b-1) on [0, 1]."""

    a: float
    b: float
    scale: float = 1.0

    def evaluate(self, lower_gap, upper_gap) -> np.ndarray:
        return self.scale * np.exp(xlogy(self.a - 1.0, lower_gap) + xlogy(self.b - 1.0, upper_gap))

    def moment(self, successes: float = 0.0, failures: float = 0.0) -> float:
        """Integral of p^successes (1-p)^failures against the kernel; inf when it diverges."""
        a, b = self.a + successes, self.b + failures
        if a <= 0 or b <= 0:
            return float("inf")
        return float(self.scale * np.exp(betaln(a, b)))

    @property
    def integrable(self) -> bool:
        return self.a > 0 and self.b > 0

    def scaled(self, factor: float) -> "BetaKernel":
        return BetaKernel(self.a, self.b, self.scale * factor)


@dataclass(frozen=True, eq=False)
class PriorMeasure:
    """
    Point atoms plus a density on a parameter domain.

    ``proper`` measures have total mass 1. Improper ones carry no total_mass;
    ``divergent`` marks those known to have infinite mass. ``constant`` is the
    factor applied to the raw kernel (the MDIP normalizing constant, 1/B(a, b)
    for Beta priors). ``beta_kernel`` is set when the density is a Beta kernel
    on [0, 1], which gives closed forms downstream.
    """

    label: str
    domain: ParamDomain
    density: Optional[EndpointFunction]
    atoms: Tuple[Tuple[float, float], ...] = ()
    proper: bool = False
    total_mass: Optional[float] = None
    constant: float = 1.0
    divergent: bool = False
    beta_kernel: Optional[BetaKernel] = None
    support_grid: Optional[Grid] = None

    def __post_init__(self):
        atoms = []
        for loc, mass in self.atoms:
            loc, mass = float(loc), float(mass)
            if not self.domain.lower <= loc <= self.domain.upper:
                raise DomainError(f"atom at {loc!r} lies outside [{self.domain.lower}, {self.domain.upper}]")
            if not mass >= 0:
                raise DomainError(f"atom mass must be nonnegative, got {mass!r} at {loc!r}")
            if mass > 0:
                atoms.append((loc, mass))
        object.__setattr__(self, "atoms", tuple(atoms))
        if self.proper:
            if self.atom_mass > 1.0 + ATOM_SUM_TOL:
                raise DomainError(f"atom masses of a proper prior sum to {self.atom_mass!r} > 1")
            object.__setattr__(self, "total_mass", 1.0)
        else:
            object.__setattr__(self, "total_mass", None)

    @property
    def atom_mass(self) -> float:
        return float(sum(mass for _, mass in self.atoms))

    @property
    def has_atoms(self) -> bool:
        return bool(self.atoms)

    def __call__(self, theta) -> np.ndarray:
        """Density at theta (atoms excluded)."""
        theta = np.asarray(theta, dtype=float)
        if self.density is None:
            return np.zeros(theta.shape)
        return self.density(theta)

    def density_on(self, grid: Grid) -> np.ndarray:
        if self.density is None:
            return np.zeros(len(grid))
        return self.density.on_grid(grid)

    def scaled(self, factor: float) -> "PriorMeasure":
        """The same kernel multiplied by a positive factor (no longer normalized)."""
        if not factor > 0:
            raise ValueError(f"scale factor must be positive, got {factor!r}")
        return replace(
            self,
            label=f"{self.label}*{factor:g}",
            density=self.density.scaled(factor) if self.density is not None else None,
            atoms=tuple((loc, mass * factor) for loc, mass in self.atoms),
            proper=False,
            constant=self.constant * factor,
            beta_kernel=self.beta_kernel.scaled(factor) if self.beta_kernel else None,
        )


def _beta_domain(a: float, b: float) -> ParamDomain:
    singular = set()
    if a < 1:
        singular.add(LOWER)
    if b < 1:
        singular.add(UPPER)
    return ParamDomain(0.0, 1.0, LOWER in singular, UPPER in singular, frozenset(singular))


def _kernel_density(kernel: BetaKernel, domain: ParamDomain) -> EndpointFunction:
    return EndpointFunction(lambda theta, lo, up: kernel.evaluate(lo, up), domain)


def laplace_uniform(domain: ParamDomain) -> PriorMeasure:
    """Constant density 1/(upper - lower) on a finite domain."""
    if not domain.is_finite:
        raise DomainError("the uniform prior needs a finite domain")
    height = 1.0 / domain.length
    kernel = BetaKernel(1.0, 1.0, 1.0) if (domain.lower, domain.upper) == (0.0, 1.0) else None
    return PriorMeasure(
        label=UNIFORM,
        domain=domain,
        density=EndpointFunction(lambda theta, lo, up: np.full(np.shape(theta), height), domain),
        proper=True,
        constant=height,
        beta_kernel=kernel,
    )


def beta_prior(a: float, b: float, label: Optional[str] = None) -> PriorMeasure:
    """
    Beta(a, b) on [0, 1]; normalized when a, b > 0, otherwise the improper kernel.

    Args:
        a: First shape, >= 0
        b: Second shape, >= 0
        label: Record label, defaults to "beta(a,b)"

    Returns:
        PriorMeasure carrying a BetaKernel
    """
    if not (a >= 0 and b >= 0):
        raise DomainError(f"beta shapes must be nonnegative, got ({a!r}, {b!r})")
    domain = _beta_domain(a, b)
    proper = a > 0 and b > 0
    scale = float(np.exp(-betaln(a, b))) if proper else 1.0
    kernel = BetaKernel(float(a), float(b), scale)
    return PriorMeasure(
        label=label or f"beta({a:g},{b:g})",
        domain=domain,
        density=_kernel_density(kernel, domain),
        proper=proper,
        constant=scale,
        divergent=not proper,
        beta_kernel=kernel,
    )


def haldane_prior() -> PriorMeasure:
    """Improper 1/(p(1-p)) on (0, 1)."""
    return beta_prior(0.0, 0.0, label=HALDANE)


def jeffreys_binomial_prior() -> PriorMeasure:
    """Closed-form Jeffreys prior for the binomial parameter, Beta(1/2, 1/2)."""
    return beta_prior(0.5, 0.5, label=JEFFREYS)


def arcsine_prior() -> PriorMeasure:
    """1/(pi sqrt(1 - rho^2)) on (-1, 1)."""
    domain = ParamDomain.open_singular(-1.0, 1.0)
    return PriorMeasure(
        label=ARCSINE,
        domain=domain,
        density=EndpointFunction(lambda theta, lo, up: 1.0 / (np.pi * np.sqrt(lo * up)), domain),
        proper=True,
        constant=1.0 / np.pi,
    )


def jeffreys_mixed_prior(k0: float, k1: float) -> PriorMeasure:
    """
    Lumps of mass k0 at 0 and k1 at 1 with the rest spread uniformly on [0, 1].

    Args:
        k0: Mass at p = 0
        k1: Mass at p = 1

    Returns:
        Proper mixed measure
    """
    if not (k0 >= 0 and k1 >= 0):
        raise DomainError(f"lump masses must be nonnegative, got ({k0!r}, {k1!r})")
    if k0 + k1 >= 1:
        raise DomainError(f"lump masses must sum to less than 1, got {k0 + k1!r}")
    height = 1.0 - k0 - k1
    domain = ParamDomain.closed(0.0, 1.0)
    kernel = BetaKernel(1.0, 1.0, height)
    label = UNIFORM if k0 == 0 and k1 == 0 else f"{MIXED}({k0:g},{k1:g})"
    return PriorMeasure(
        label=label,
        domain=domain,
        density=_kernel_density(kernel, domain),
        atoms=((0.0, k0), (1.0, k1)),
        proper=True,
        constant=height,
        beta_kernel=kernel,
    )


def normalize(prior: PriorMeasure, rel_tol: float = DEFAULT_REL_TOL) -> PriorMeasure:
    """
    Rescale density and atoms jointly to total mass 1.

    Raises:
        ImproperMeasureError: The density integral diverges or cannot be
            established by adaptive quadrature
    """
    if prior.proper:
        return prior
    if prior.divergent:
        raise ImproperMeasureError(f"{prior.label} has infinite total mass")

    if prior.density is None:
        continuous = 0.0
    elif prior.beta_kernel is not None:
        if not prior.beta_kernel.integrable:
            raise ImproperMeasureError(f"{prior.label} has infinite total mass")
        continuous = prior.beta_kernel.moment()
    else:
        try:
            continuous = adaptive_integrate(prior.density, prior.domain, rel_tol)
        except IntegrationError as e:
            raise ImproperMeasureError(f"{prior.label}: {e}") from e

    total = continuous + prior.atom_mass
    if not (np.isfinite(total) and total > 0):
        raise ImproperMeasureError(f"{prior.label} has total mass {total!r}")
    logger.info("normalized %s (total mass %.17g)", prior.label, total)
    factor = 1.0 / total
    return replace(
        prior.scaled(factor),
        label=prior.label,
        proper=True,
    )


def _check_finite_on(values: np.ndarray, grid: Grid, context: str) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise NonFiniteValueError(float(grid.nodes[idx]), float(values[idx]), context)


def mdip_kernel(model: LikelihoodModel) -> PriorMeasure:
    """Unnormalized exp(I(theta)) for a model with a one-dimensional parameter."""
    _require_scalar_parameter(model, "mdip_kernel")
    if isinstance(model, AR1Model):
        raise ModelError("the AR(1) MDIP is available through mdip_ar1_density")
    domain = model.theta_domain

    def kernel(theta, lo, up):
        info = model.neg_entropy(theta, lo, up)
        if info is None:
            info = np.vectorize(lambda t: data_density_information(model, t, "quadrature"))(theta)
        return np.exp(info)

    return PriorMeasure(label=f"{MDIP}-kernel", domain=domain, density=EndpointFunction(kernel, domain))


def mdip_prior(model: LikelihoodModel, grid: Grid, rel_tol: float = DEFAULT_REL_TOL) -> PriorMeasure:
    """
    Maximal data information prior, c * exp(I(theta)).

    Args:
        model: Model with a one-dimensional parameter
        grid: Grid the prior is tabulated on (the default inference grid)
        rel_tol: Tolerance for the normalizing integral

    Returns:
        Proper prior when exp(I) is integrable, otherwise the improper kernel
    """
    info = information_on(model, grid)
    _check_finite_on(info, grid, "data-density information")
    kernel = mdip_kernel(model)
    try:
        prior = normalize(kernel, rel_tol)
    except ImproperMeasureError:
        logger.warning("mdip kernel for %s is not integrable; returning it unnormalized", model.label)
        return replace(kernel, label=MDIP, divergent=True, support_grid=grid)
    logger.info("mdip prior for %s: constant %.17g", model.label, prior.constant)
    return replace(prior, label=MDIP, support_grid=grid)


def mdip_simplex_density(model: MultinomialModel, theta) -> np.ndarray:
    """Unnormalized MDIP kernel prod p_i^p_i on the probability simplex."""
    return np.exp(model.neg_entropy(theta))


def _rule_kernel(model: LikelihoodModel, domain: ParamDomain, h: float) -> EndpointFunction:
    def kernel(theta, lo, up):
        theta = np.asarray(theta, dtype=float)
        closed = model.fisher_closed_form(theta, lo, up)
        if closed is not None:
            info = np.asarray(closed, dtype=float)
        else:
            steps = np.minimum(h, np.minimum(lo, up) / 32.0)
            info = fisher_information_at(model, theta, lo, up, steps)
        negative = info < 0
        if np.any(negative):
            idx = np.unravel_index(int(np.argmax(negative)), np.shape(negative))
            raise ModelError(
                f"negative Fisher information estimate {float(info[idx])!r} at node {float(theta[idx])!r}"
            )
        return np.sqrt(info)

    return EndpointFunction(kernel, domain)


def jeffreys_rule_prior(
    model: LikelihoodModel,
    grid: Grid,
    h: float = RULE_FD_STEP,
    rel_tol: float = DEFAULT_REL_TOL,
) -> PriorMeasure:
    """
    Jeffreys's rule prior, proportional to sqrt(Fisher information).

    The Fisher information is estimated by finite differences at every point
    the density is evaluated, with the step shrunk to 1/32 of the distance to
    the nearer endpoint. Endpoints are treated as possible singularities.

    Args:
        model: Model with a one-dimensional parameter
        grid: Grid the prior is tabulated on
        h: Finite-difference step away from the endpoints
        rel_tol: Tolerance for the normalizing integral

    Returns:
        Normalized prior, or the improper kernel when the integral diverges
    """
    _require_scalar_parameter(model, "jeffreys_rule_prior")
    domain = ParamDomain.open_singular(model.theta_domain.lower, model.theta_domain.upper)
    density = _rule_kernel(model, domain, h)
    _check_finite_on(density.on_grid(grid), grid, "Fisher information")
    kernel = PriorMeasure(label=JEFFREYS, domain=domain, density=density, support_grid=grid)
    try:
        return normalize(kernel, rel_tol)
    except ImproperMeasureError:
        logger.warning("Jeffreys rule prior for %s is improper", model.label)
        return replace(kernel, divergent=True)


def _ar1_gaps(b) -> Tuple[np.ndarray, np.ndarray]:
    b = np.asarray(b, dtype=float)
    return 1.0 + b, 1.0 - b


def mdip_ar1_density(b, sigma) -> np.ndarray:
    """AR(1) MDIP kernel (1 - b^2)^(1/2) / sigma."""
    AR1Model.check_parameters(b, sigma)
    lo, up = _ar1_gaps(b)
    return np.sqrt(lo * up) / sigma


def jeffreys_ar1_density(b, sigma) -> np.ndarray:
    """AR(1) Jeffreys kernel 1 / ((1 - b^2)^(1/2) sigma)."""
    AR1Model.check_parameters(b, sigma)
    lo, up = _ar1_gaps(b)
    return 1.0 / (np.sqrt(lo * up) * sigma)


def ar1_b_prior(kind: str, sigma: float) -> PriorMeasure:
    """The printed AR(1) kernel in b at a fixed sigma, as an unnormalized prior on (-1, 1)."""
    AR1Model.check_parameters(0.0, sigma)
    domain = ParamDomain.open_singular(-1.0, 1.0)
    if kind == MDIP:
        density = EndpointFunction(lambda b, lo, up: np.sqrt(lo * up) / sigma, domain)
    elif kind == JEFFREYS:
        density = EndpointFunction(lambda b, lo, up: 1.0 / (np.sqrt(lo * up) * sigma), domain)
    else:
        raise ModelError(f"unknown AR(1) prior kind {kind!r}; expected 'mdip' or 'jeffreys'")
    return PriorMeasure(label=f"ar1-{kind}", domain=domain, density=density)


def tabulated_prior(
    grid: Grid,
    values: np.ndarray,
    atoms: Sequence[Tuple[float, float]] = (),
    label: str = "tabulated",
    proper: bool = True,
) -> PriorMeasure:
    """
    Prior known only through its values at grid nodes.

    On the grid itself the stored values are returned exactly; elsewhere the
    density is linearly interpolated.
    """
    nodes = grid.nodes
    table = np.array(values, dtype=float)
    table.setflags(write=False)

    def density(theta, lo, up):
        theta = np.asarray(theta, dtype=float)
        if theta is nodes or (theta.shape == nodes.shape and np.array_equal(theta, nodes)):
            return table
        return np.interp(theta, nodes, table)

    return PriorMeasure(
        label=label,
        domain=grid.domain,
        density=EndpointFunction(density, grid.domain),
        atoms=tuple(atoms),
        proper=proper,
        support_grid=grid,
    )


def prior_from_kind(
    kind: str,
    model: LikelihoodModel,
    grid: Grid,
    k0: Optional[float] = None,
    k1: Optional[float] = None,
    rel_tol: float = DEFAULT_REL_TOL,
    h: float = RULE_FD_STEP,
) -> PriorMeasure:
    """Build a prior by its CLI name for a model."""
    if kind == UNIFORM:
        return replace(laplace_uniform(model.theta_domain), support_grid=grid)
    if kind == HALDANE:
        _require_unit_interval(model, kind)
        return replace(haldane_prior(), support_grid=grid)
    if kind == JEFFREYS:
        return jeffreys_rule_prior(model, grid, h, rel_tol)
    if kind == MDIP:
        return mdip_prior(model, grid, rel_tol)
    if kind == MIXED:
        _require_unit_interval(model, kind)
        if k0 is None or k1 is None:
            raise ModelError("the mixed prior needs both lump masses k0 and k1")
        return replace(jeffreys_mixed_prior(k0, k1), support_grid=grid)
    if kind == ARCSINE:
        if (model.theta_domain.lower, model.theta_domain.upper) != (-1.0, 1.0):
            raise ModelError(f"the arcsine prior lives on (-1, 1), not the {model.label} parameter")
        return replace(arcsine_prior(), support_grid=grid)
    raise ModelError(f"unknown prior kind {kind!r}")


def _require_unit_interval(model: LikelihoodModel, kind: str) -> None:
    if (model.theta_domain.lower, model.theta_domain.upper) != (0.0, 1.0):
        raise ModelError(f"the {kind} prior is defined on [0, 1], not the {model.label} parameter")


PRIOR_KINDS = (UNIFORM, HALDANE, JEFFREYS, MDIP, MIXED, ARCSINE)
