"""Grid posteriors, the rule of succession and information-processing efficiency."""

import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from priorlab.core.models import (
    AR1Model,
    BernoulliModel,
    Dataset,
    LikelihoodModel,
    MultinomialModel,
)
from priorlab.core.numerics import (
    TANH_SINH,
    GriddedDensity,
    Grid,
    ParamDomain,
    build_grid,
    endpoint_leakage,
    integrate,
    shannon_neg_entropy,
)
from priorlab.core.priors import PriorMeasure, ar1_b_prior, tabulated_prior
from priorlab.exceptions import (
    AtomsNotSupportedError,
    DomainError,
    ImproperMeasureError,
    ImproperPosteriorError,
    SupportError,
    ZeroMarginalError,
)

logger = logging.getLogger(__name__)

EFFICIENCY_TOL = 1e-8
# Relative t-space tail mass above which a posterior under an improper prior
# is declared non-integrable.
LEAKAGE_TOL = 1e-6
LEAKAGE_NODES = 512
SUCCESSION_GRID_SIZE = 2048


@dataclass(frozen=True, eq=False)
class PosteriorResult:
    """
    Normalized posterior: continuous part on a grid plus atom masses.

    ``log_normalizer`` is the log of the constant the grid values were divided
    by; ``marginal`` may come from a finer endpoint rule and differ from it.
    """

    density: GriddedDensity
    atoms: Tuple[Tuple[float, float], ...]
    marginal: float
    log_marginal: float
    prior_label: str
    data_summary: str
    prior_normalized: bool = True
    log_normalizer: Optional[float] = None

    @property
    def grid(self) -> Grid:
        return self.density.grid

    def total_mass(self) -> float:
        return self.density.total() + sum(mass for _, mass in self.atoms)

    def mean(self) -> float:
        continuous = integrate(self.density.values * self.grid.nodes, self.grid)
        return continuous + sum(loc * mass for loc, mass in self.atoms)

    def sd(self) -> float:
        mu = self.mean()
        centred = np.square(self.grid.nodes - mu)
        variance = integrate(self.density.values * centred, self.grid)
        variance += sum((loc - mu) ** 2 * mass for loc, mass in self.atoms)
        return float(np.sqrt(max(variance, 0.0)))

    def as_prior(self) -> PriorMeasure:
        """This posterior as a prior tabulated on the same grid."""
        return tabulated_prior(
            self.grid,
            self.density.values,
            self.atoms,
            label=f"posterior[{self.prior_label}]",
            proper=True,
        )


@dataclass(frozen=True)
class InfoReport:
    output_info: float
    input_info: float
    delta: float
    efficiency: float
    candidate_label: str

    def as_dict(self) -> dict:
        return {
            "candidate": self.candidate_label,
            "output_info": self.output_info,
            "input_info": self.input_info,
            "delta": self.delta,
            "efficiency": self.efficiency,
        }


def summarize_data(model: LikelihoodModel, data: Dataset) -> str:
    if isinstance(model, BernoulliModel):
        successes, failures = model.counts(data)
        return f"{successes} successes, {failures} failures"
    if isinstance(model, MultinomialModel):
        return "counts " + ",".join(str(int(c)) for c in model.counts(data))
    return f"{len(data)} observations"


def _same_interval(a: ParamDomain, b: ParamDomain) -> bool:
    return (a.lower, a.upper) == (b.lower, b.upper)


def _check_grid(grid: Grid, model: LikelihoodModel, prior: Optional[PriorMeasure]) -> None:
    if not _same_interval(grid.domain, model.theta_domain):
        raise DomainError(
            f"grid on [{grid.domain.lower}, {grid.domain.upper}] does not cover the "
            f"{model.label} parameter domain [{model.theta_domain.lower}, {model.theta_domain.upper}]"
        )
    if prior is not None and not _same_interval(prior.domain, model.theta_domain):
        raise DomainError(f"prior {prior.label} lives on a different interval than the {model.label} parameter")


def _check_posterior_integrable(prior: PriorMeasure, model: LikelihoodModel, data: Dataset, loglik_fn) -> None:
    """Fail with ImproperPosteriorError when an improper prior meets uninformative data."""
    if prior.proper:
        return
    kernel = prior.beta_kernel
    if kernel is not None and isinstance(model, (BernoulliModel, MultinomialModel)) and model.parameter_dim == 1:
        if isinstance(model, BernoulliModel):
            successes, failures = model.counts(data)
        else:
            counts = model.counts(data)
            successes, failures = counts[0], counts[1]
        if not np.isfinite(kernel.moment(successes, failures)):
            raise ImproperPosteriorError(
                f"{prior.label} with {successes} successes and {failures} failures has a divergent normalizer"
            )
        return
    if prior.density is None:
        return
    leak_grid = build_grid(ParamDomain.open_singular(prior.domain.lower, prior.domain.upper), LEAKAGE_NODES, TANH_SINH)
    loglik = loglik_fn(leak_grid)
    values = prior.density_on(leak_grid) * np.exp(loglik - np.max(loglik))
    leakage = endpoint_leakage(values, leak_grid)
    if leakage > LEAKAGE_TOL:
        raise ImproperPosteriorError(
            f"{prior.label} times the likelihood does not decay at the endpoints (tail ratio {leakage:.3g})"
        )


def _singular_normalizer(prior: PriorMeasure, n: int, loglik_fn, shift: float) -> float:
    """Continuous part of the normalizer on a tanh-sinh rule over the prior's own domain."""
    rule = build_grid(prior.domain, n, TANH_SINH)
    with np.errstate(under="ignore"):
        values = prior.density_on(rule) * np.exp(loglik_fn(rule) - shift)
    return integrate(values, rule)


def _grid_posterior(
    prior: PriorMeasure,
    grid: Grid,
    loglik: np.ndarray,
    atom_loglik: np.ndarray,
    data_summary: str,
    loglik_fn=None,
) -> PosteriorResult:
    """
    Normalize prior times likelihood on the grid.

    The density is normalized with the grid's own weights. When the grid is not
    tanh-sinh but the prior has singular endpoints, the reported marginal comes
    from a tanh-sinh rule of the same size, which resolves the endpoint mass.
    """
    prior_values = prior.density_on(grid)
    atom_masses = np.array([mass for _, mass in prior.atoms], dtype=float)

    live = np.concatenate([loglik[prior_values > 0], atom_loglik[atom_masses > 0]])
    live = live[np.isfinite(live)]
    if live.size == 0:
        raise ZeroMarginalError(f"data ({data_summary}) have probability zero under {prior.label}")
    shift = float(np.max(live))

    with np.errstate(under="ignore"):
        continuous = prior_values * np.exp(loglik - shift)
        atom_weights = atom_masses * np.exp(atom_loglik - shift)
    z = integrate(continuous, grid) + float(np.sum(atom_weights))
    if not z > 0:
        raise ZeroMarginalError(f"data ({data_summary}) have probability zero under {prior.label}")

    posterior_atoms = tuple((loc, float(w / z)) for (loc, _), w in zip(prior.atoms, atom_weights))
    has_mass_atoms = any(mass > 0 for _, mass in posterior_atoms)
    density = GriddedDensity(grid, continuous / z, normalized=not has_mass_atoms)
    z_marginal = z
    if (
        loglik_fn is not None
        and grid.scheme != TANH_SINH
        and prior.domain.singular_endpoints
        and prior.density is not None
    ):
        z_marginal = _singular_normalizer(prior, len(grid), loglik_fn, shift) + float(np.sum(atom_weights))
    log_marginal = float(np.log(z_marginal) + shift)
    logger.info("posterior under %s (%s): log marginal %.17g", prior.label, data_summary, log_marginal)
    return PosteriorResult(
        density=density,
        atoms=posterior_atoms,
        marginal=float(np.exp(log_marginal)),
        log_marginal=log_marginal,
        log_normalizer=float(np.log(z) + shift),
        prior_label=prior.label,
        data_summary=data_summary,
        prior_normalized=prior.proper,
    )


def posterior(prior: PriorMeasure, model: LikelihoodModel, data: Dataset, grid: Grid) -> PosteriorResult:
    """
    Grid posterior prior(theta) * exp(loglik(theta, data)), atoms included.

    Args:
        prior: Prior measure on the model's parameter interval
        model: Likelihood model with a one-dimensional parameter
        data: Observations for the model
        grid: Grid over the model's parameter domain

    Returns:
        PosteriorResult normalized to total mass 1

    Raises:
        ZeroMarginalError: The data are impossible under the whole prior
        ImproperPosteriorError: The posterior normalizer diverges
    """
    _check_grid(grid, model, prior)
    model.validate(data)

    def loglik_fn(g: Grid) -> np.ndarray:
        return model.loglik_on(g, data)

    _check_posterior_integrable(prior, model, data, loglik_fn)
    loglik = model.loglik_on(grid, data)
    atom_loglik = np.array([float(model.loglik(loc, data)) for loc, _ in prior.atoms], dtype=float)
    return _grid_posterior(prior, grid, loglik, atom_loglik, summarize_data(model, data), loglik_fn)


def _closed_form_succession(prior: PriorMeasure, n: int) -> Optional[float]:
    kernel = prior.beta_kernel
    if kernel is None:
        return None
    numerator = kernel.moment(n + 1) + sum(loc ** (n + 1) * mass for loc, mass in prior.atoms)
    denominator = kernel.moment(n) + sum(loc ** n * mass for loc, mass in prior.atoms)
    if not np.isfinite(denominator):
        raise ImproperPosteriorError(f"{prior.label} after {n} successes in {n} trials")
    return numerator / denominator


def rule_of_succession(
    prior: PriorMeasure,
    n: int,
    grid: Optional[Grid] = None,
    limit: bool = False,
) -> float:
    """
    Probability of a success on trial n + 1 after n successes in n trials.

    Args:
        prior: Prior on [0, 1]
        n: Number of trials, all successes
        grid: Quadrature grid; defaults to the prior's support grid
        limit: Return the Haldane limit (1 for n >= 1, 1/2 for n = 0) when the
            prior is Haldane's kernel and the posterior is improper

    Returns:
        E[p | data]
    """
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    n = int(n)
    if (prior.domain.lower, prior.domain.upper) != (0.0, 1.0):
        raise DomainError(f"rule of succession needs a prior on [0, 1], got {prior.label}")

    try:
        closed = _closed_form_succession(prior, n)
    except ImproperPosteriorError:
        kernel = prior.beta_kernel
        if limit and kernel is not None and kernel.a == 0 and kernel.b == 0:
            logger.warning("using the Haldane limit convention for n=%d", n)
            return 1.0 if n >= 1 else 0.5
        raise
    if closed is not None:
        return float(closed)

    if grid is None:
        grid = prior.support_grid or build_grid(prior.domain, SUCCESSION_GRID_SIZE, TANH_SINH)
    p = grid.lower_gaps + (grid.domain.lower - prior.domain.lower)
    weighted = prior.density_on(grid) * p ** n
    if not prior.proper and grid.scheme == TANH_SINH and endpoint_leakage(weighted, grid) > LEAKAGE_TOL:
        raise ImproperPosteriorError(f"{prior.label} after {n} successes in {n} trials")
    numerator = integrate(weighted * p, grid) + sum(loc ** (n + 1) * mass for loc, mass in prior.atoms)
    denominator = integrate(weighted, grid) + sum(loc ** n * mass for loc, mass in prior.atoms)
    if not denominator > 0:
        raise ZeroMarginalError(f"{prior.label} gives the data zero probability")
    return float(numerator / denominator)


def _require_continuous_proper(prior: PriorMeasure, what: str) -> None:
    if prior.has_atoms:
        raise AtomsNotSupportedError(f"{what} is defined for purely continuous priors; {prior.label} has atoms")
    if not prior.proper:
        raise ImproperMeasureError(f"{what} needs a proper prior, got {prior.label}")


def optimal_output(prior: PriorMeasure, model: LikelihoodModel, data: Dataset, grid: Grid) -> GriddedDensity:
    """The output density minimizing output minus input information: the Bayes posterior."""
    _require_continuous_proper(prior, "optimal_output")
    return posterior(prior, model, data, grid).density


def likelihood_only_output(model: LikelihoodModel, data: Dataset, grid: Grid) -> GriddedDensity:
    """Normalized likelihood over theta, the output when no prior input is supplied."""
    _check_grid(grid, model, None)
    model.validate(data)
    loglik = model.loglik_on(grid, data)
    finite = loglik[np.isfinite(loglik)]
    if finite.size == 0:
        raise ZeroMarginalError("the likelihood vanishes on the whole grid")
    with np.errstate(under="ignore"):
        values = np.exp(loglik - np.max(finite))
    if grid.scheme == TANH_SINH and endpoint_leakage(values, grid) > LEAKAGE_TOL:
        raise ImproperPosteriorError("the likelihood is not integrable over the parameter domain")
    return GriddedDensity.from_values(grid, values)


def info_delta(
    candidate: GriddedDensity,
    prior: Optional[PriorMeasure],
    model: LikelihoodModel,
    data: Dataset,
    include_prior: bool = True,
    label: str = "candidate",
) -> InfoReport:
    """
    Output information minus input information for a candidate output density.

    output_info = int g ln g + ln m(y); input_info = int g ln prior + int g ln L.
    The difference equals KL(g || posterior), so it vanishes exactly for the
    Bayes posterior. With ``include_prior=False`` the prior term is dropped and
    m(y) becomes the likelihood normalizer.

    Args:
        candidate: Normalized density on a grid over the model's parameter domain
        prior: Proper continuous prior (ignored when include_prior is False)
        model: Likelihood model
        data: Observations
        include_prior: Whether the prior counts as input information
        label: Name reported with the result

    Returns:
        InfoReport with efficiency exp(-delta), exactly 1 when |delta| <= 1e-8
    """
    grid = candidate.grid
    _check_grid(grid, model, prior if include_prior else None)
    model.validate(data)
    g = candidate.values
    loglik = model.loglik_on(grid, data)
    weights = grid.weights

    if include_prior:
        _require_continuous_proper(prior, "info_delta")
        prior_values = prior.density_on(grid)
        bad = (g > 0) & (prior_values <= 0)
        if np.any(bad):
            raise SupportError(float(grid.nodes[np.argmax(bad)]), "candidate is positive where the prior vanishes")
        result = posterior(prior, model, data, grid)
        reference, log_marginal = result.density.values, result.log_normalizer
        with np.errstate(divide="ignore", invalid="ignore"):
            prior_term = float(np.sum(weights * np.where(g > 0, g * np.log(prior_values), 0.0)))
    else:
        reference = likelihood_only_output(model, data, grid).values
        finite = loglik[np.isfinite(loglik)]
        shift = float(np.max(finite))
        log_marginal = float(np.log(integrate(np.exp(loglik - shift), grid)) + shift)
        prior_term = 0.0

    bad = (g > 0) & (reference <= 0)
    if np.any(bad):
        raise SupportError(float(grid.nodes[np.argmax(bad)]), "candidate support exceeds the posterior support")

    output_info = shannon_neg_entropy(candidate) + log_marginal
    with np.errstate(invalid="ignore"):
        likelihood_term = float(np.sum(weights * np.where(g > 0, g * loglik, 0.0)))
    input_info = prior_term + likelihood_term
    delta = output_info - input_info
    efficiency = 1.0 if abs(delta) <= EFFICIENCY_TOL else float(np.exp(-max(delta, 0.0)))
    logger.debug("info_delta %s: output %.17g input %.17g delta %.3g", label, output_info, input_info, delta)
    return InfoReport(output_info, input_info, delta, efficiency, label)


def random_candidates(
    reference: GriddedDensity,
    count: int,
    rng: np.random.Generator,
) -> Iterator[GriddedDensity]:
    """
    Seeded perturbations (1 - lam) * reference + lam * bump of a normalized density.

    Bumps are Gaussian, restricted to the reference support, with lam drawn
    from [0.05, 0.95].
    """
    grid = reference.grid
    domain = grid.domain
    support = reference.values > 0
    for _ in range(count):
        center = rng.uniform(domain.lower, domain.upper)
        width = rng.uniform(0.05, 0.3) * domain.length
        lam = rng.uniform(0.05, 0.95)
        bump = np.exp(-0.5 * np.square((grid.nodes - center) / width)) * support
        bump = bump / integrate(bump, grid)
        yield GriddedDensity.from_values(grid, (1.0 - lam) * reference.values + lam * bump)


def ar1_posterior_b(data: Dataset, sigma: float, prior_kind: str, grid: Grid) -> PosteriorResult:
    """
    Posterior over the AR(1) coefficient b at a known sigma.

    Args:
        data: Series of length T >= 2
        sigma: Known innovation scale
        prior_kind: "mdip" or "jeffreys"
        grid: Grid on (-1, 1)

    Returns:
        Normalized posterior over b
    """
    model = AR1Model(len(data))
    prior = ar1_b_prior(prior_kind, sigma)
    if not _same_interval(grid.domain, prior.domain):
        raise DomainError("the AR(1) posterior needs a grid on (-1, 1)")
    model.validate(data)

    def loglik_fn(g: Grid) -> np.ndarray:
        return model.loglik_b_on(g, sigma, data)

    _check_posterior_integrable(prior, model, data, loglik_fn)
    loglik = loglik_fn(grid)
    summary = f"T={len(data)}, sigma={sigma:g}"
    return _grid_posterior(prior, grid, loglik, np.empty(0), summary, loglik_fn)
