"""Likelihood models with the structure prior constructors need.

Each model exposes its per-observation log density, the log-likelihood of a
dataset, and (for one-dimensional parameters) enough structure to compute the
data-density information I(theta) and the Fisher information.
"""

import logging
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import xlogy

from priorlab.core.numerics import (
    DEFAULT_GRID_SIZE,
    GAUSS_LEGENDRE,
    Grid,
    ParamDomain,
    UNIT_INTERVAL,
    build_grid,
    integrate_product,
)
from priorlab.exceptions import DomainError, ModelError

logger = logging.getLogger(__name__)

DEFAULT_FD_STEP = 1e-4
FD_STEP_RANGE = (1e-6, 1e-3)
SAMPLE_SD = 8.0
SAMPLE_NODES = 128

_LOG_2PI = float(np.log(2.0 * np.pi))
_SQRT2 = float(np.sqrt(2.0))


@dataclass(frozen=True)
class SampleSpace:
    """Sample space of one observation: a finite outcome list or a real box."""

    outcomes: Optional[Tuple[int, ...]] = None
    domain: Optional[ParamDomain] = None
    dimension: int = 1
    scale: float = 1.0

    @property
    def is_discrete(self) -> bool:
        return self.outcomes is not None


@dataclass(frozen=True)
class Dataset:
    """Ordered observations tagged with the label of the model they belong to."""

    observations: Tuple
    model_label: str

    def __len__(self) -> int:
        return len(self.observations)

    @classmethod
    def from_counts(cls, successes: int, failures: int = 0) -> "Dataset":
        """Bernoulli dataset with the successes first."""
        if successes < 0 or failures < 0:
            raise ModelError("counts must be nonnegative")
        return cls(tuple([1] * successes + [0] * failures), "bernoulli")

    def extended(self, other: "Dataset") -> "Dataset":
        if other.model_label != self.model_label:
            raise ModelError(f"cannot join {self.model_label!r} and {other.model_label!r} data")
        return Dataset(self.observations + other.observations, self.model_label)


class LikelihoodModel(ABC):
    """Base class for sampling models.

    ``logdensity`` receives theta together with its exact distances to the
    ends of ``theta_domain``; models whose density has ln(p) or ln(1 - rho^2)
    terms use the gaps so that values near the endpoints keep full precision.
    """

    label: str = ""
    parameter_dim: int = 1

    def __init__(self, theta_domain: ParamDomain, sample_space: SampleSpace):
        self.theta_domain = theta_domain
        self.sample_space = sample_space

    def __repr__(self) -> str:
        return f"{type(self).__name__}(label={self.label!r})"

    @abstractmethod
    def logdensity(self, theta, lower_gap, upper_gap, y) -> np.ndarray:
        """Log density of one observation y, vectorized over theta."""

    def validate_observation(self, y) -> None:
        if self.sample_space.is_discrete and y not in self.sample_space.outcomes:
            raise ModelError(f"observation {y!r} is not an outcome of {self.label}")

    def validate(self, data: Dataset) -> None:
        if data.model_label != self.label:
            raise ModelError(f"dataset for {data.model_label!r} given to model {self.label!r}")
        for y in data.observations:
            self.validate_observation(y)

    def per_obs_logdensity(self, theta, y) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        lower_gap, upper_gap = self.theta_domain.gaps(theta)
        return self.logdensity(theta, lower_gap, upper_gap, y)

    def density(self, theta, y) -> np.ndarray:
        return np.exp(self.per_obs_logdensity(theta, y))

    def _loglik(self, theta, lower_gap, upper_gap, data: Dataset) -> np.ndarray:
        total = np.zeros(np.shape(theta))
        for y in data.observations:
            total = total + self.logdensity(theta, lower_gap, upper_gap, y)
        return total

    def loglik(self, theta, data: Dataset) -> np.ndarray:
        self.validate(data)
        theta = np.asarray(theta, dtype=float)
        lower_gap, upper_gap = self.theta_domain.gaps(theta)
        return self._loglik(theta, lower_gap, upper_gap, data)

    def loglik_on(self, grid: Grid, data: Dataset) -> np.ndarray:
        """Log-likelihood at every node of a grid over theta_domain."""
        self.validate(data)
        return self._loglik(grid.nodes, grid.lower_gaps, grid.upper_gaps, data)

    def neg_entropy(self, theta, lower_gap, upper_gap) -> Optional[np.ndarray]:
        """Closed-form I(theta) when the model has one, else None."""
        return None

    def fisher_closed_form(self, theta, lower_gap, upper_gap) -> Optional[np.ndarray]:
        """Closed-form Fisher information when the model has one, else None."""
        return None

    def sample_axes(self, lower_gap, upper_gap, n: int = SAMPLE_NODES, sd: float = SAMPLE_SD) -> Tuple[Grid, Grid]:
        """Gauss-Legendre grids over the truncated axes of a two-dimensional sample space."""
        half_width = sd * self.sample_space.scale
        grid = build_grid(ParamDomain.closed(-half_width, half_width), n, GAUSS_LEGENDRE)
        return grid, grid

    def from_sample_axes(self, u, v) -> Tuple[np.ndarray, np.ndarray]:
        """Map sample-axis coordinates to an observation; a rotation, so no Jacobian."""
        return u, v


def _log(x) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(x)


class BernoulliModel(LikelihoodModel):
    """Single dichotomous trial with success probability p on [0, 1]."""

    label = "bernoulli"

    def __init__(self):
        super().__init__(UNIT_INTERVAL, SampleSpace(outcomes=(0, 1)))

    def logdensity(self, theta, lower_gap, upper_gap, y) -> np.ndarray:
        if y == 1:
            return _log(lower_gap)
        if y == 0:
            return _log(upper_gap)
        raise ModelError(f"bernoulli outcome must be 0 or 1, got {y!r}")

    @staticmethod
    def counts(data: Dataset) -> Tuple[int, int]:
        successes = sum(1 for y in data.observations if y == 1)
        return successes, len(data.observations) - successes

    def _loglik(self, theta, lower_gap, upper_gap, data: Dataset) -> np.ndarray:
        successes, failures = self.counts(data)
        return xlogy(successes, lower_gap) + xlogy(failures, upper_gap)

    def neg_entropy(self, theta, lower_gap, upper_gap) -> np.ndarray:
        return xlogy(lower_gap, lower_gap) + xlogy(upper_gap, upper_gap)


class MultinomialModel(LikelihoodModel):
    """Single trial over k categories.

    Outcomes are 0..k-1; outcome j >= 1 has probability p_j and outcome 0 takes
    the remainder p_k = 1 - sum(p_1..p_{k-1}). With k = 2 this is the Bernoulli
    model with p = p_1.
    """

    def __init__(self, k: int):
        if int(k) != k or k < 2:
            raise ModelError(f"multinomial model needs k >= 2 categories, got {k!r}")
        self.k = int(k)
        self.label = f"multinomial-{self.k}"
        self.parameter_dim = self.k - 1
        super().__init__(UNIT_INTERVAL, SampleSpace(outcomes=tuple(range(self.k))))

    def probabilities(self, theta, lower_gap=None, upper_gap=None) -> np.ndarray:
        """Category probabilities along the last axis, ordered (p_1..p_{k-1}, remainder)."""
        theta = np.asarray(theta, dtype=float)
        if self.k == 2:
            if theta.ndim and theta.shape[-1] == 1:
                theta = theta[..., 0]
            if lower_gap is None:
                lower_gap, upper_gap = self.theta_domain.gaps(theta)
            return np.stack([lower_gap, upper_gap], axis=-1)
        if theta.ndim == 0 or theta.shape[-1] != self.k - 1:
            raise ModelError(f"{self.label} expects {self.k - 1} parameters, got shape {theta.shape}")
        remainder = 1.0 - np.sum(theta, axis=-1, keepdims=True)
        probs = np.concatenate([theta, remainder], axis=-1)
        if np.any(probs < 0) or np.any(probs > 1):
            raise DomainError(f"parameters {theta.tolist()!r} are outside the probability simplex")
        return probs

    def _outcome_index(self, y) -> int:
        self.validate_observation(y)
        return self.k - 1 if y == 0 else y - 1

    def logdensity(self, theta, lower_gap, upper_gap, y) -> np.ndarray:
        probs = self.probabilities(theta, lower_gap, upper_gap)
        return _log(probs[..., self._outcome_index(y)])

    def per_obs_logdensity(self, theta, y) -> np.ndarray:
        return _log(self.probabilities(theta)[..., self._outcome_index(y)])

    def counts(self, data: Dataset) -> np.ndarray:
        counts = np.zeros(self.k)
        for y in data.observations:
            counts[self._outcome_index(y)] += 1
        return counts

    def _loglik(self, theta, lower_gap, upper_gap, data: Dataset) -> np.ndarray:
        probs = self.probabilities(theta, lower_gap, upper_gap)
        return np.sum(xlogy(self.counts(data), probs), axis=-1)

    def loglik(self, theta, data: Dataset) -> np.ndarray:
        self.validate(data)
        if self.k == 2:
            return super().loglik(theta, data)
        return self._loglik(theta, None, None, data)

    def neg_entropy(self, theta, lower_gap=None, upper_gap=None) -> np.ndarray:
        probs = self.probabilities(theta, lower_gap, upper_gap)
        return np.sum(xlogy(probs, probs), axis=-1)


class CorrelationModel(LikelihoodModel):
    """Bivariate normal pair with zero means, common scale and correlation rho.

    ``scale`` multiplies both coordinates of every observation (variances
    scale**2); the default is the standard bivariate normal.
    """

    label = "correlation"

    def __init__(self, scale: float = 1.0):
        if not scale > 0:
            raise ModelError(f"scale must be positive, got {scale!r}")
        self.scale = float(scale)
        super().__init__(
            ParamDomain.open_singular(-1.0, 1.0),
            SampleSpace(domain=ParamDomain(-np.inf, np.inf, True, True), dimension=2, scale=self.scale),
        )

    def validate_observation(self, y) -> None:
        if len(y) != 2 or not np.all(np.isfinite(y)):
            raise ModelError(f"correlation observations are finite pairs, got {y!r}")

    def _log_normalizer(self, lower_gap, upper_gap) -> np.ndarray:
        # 1 - rho^2 = (1 + rho)(1 - rho) taken from the endpoint gaps
        return -_LOG_2PI - 2.0 * np.log(self.scale) - 0.5 * _log(lower_gap * upper_gap)

    @staticmethod
    def _quadratic_form(theta, lower_gap, upper_gap, diff_sq, sum_sq, s12) -> np.ndarray:
        """
        z1^2 - 2 rho z1 z2 + z2^2 expanded around the nearer endpoint of (-1, 1).

        diff_sq and sum_sq are (z1 - z2)^2 and (z1 + z2)^2, summed over observations.
        """
        near_upper = diff_sq + 2.0 * s12 * upper_gap
        near_lower = sum_sq - 2.0 * s12 * lower_gap
        return np.where(np.asarray(theta) >= 0.0, near_upper, near_lower)

    def sample_axes(self, lower_gap, upper_gap, n: int = SAMPLE_NODES, sd: float = SAMPLE_SD) -> Tuple[Grid, Grid]:
        """
        Grids along the principal axes u = (y1 + y2)/sqrt(2) and v = (y1 - y2)/sqrt(2).

        u and v are independent with standard deviations scale*sqrt(1 + rho) and
        scale*sqrt(1 - rho); each axis is truncated at sd of its own deviation.
        """
        grids = []
        for gap in (float(lower_gap), float(upper_gap)):
            half_width = sd * self.scale * np.sqrt(gap)
            grids.append(build_grid(ParamDomain.closed(-half_width, half_width), n, GAUSS_LEGENDRE))
        return grids[0], grids[1]

    def from_sample_axes(self, u, v) -> Tuple[np.ndarray, np.ndarray]:
        return (u + v) / _SQRT2, (u - v) / _SQRT2

    def logdensity(self, theta, lower_gap, upper_gap, y) -> np.ndarray:
        z1 = np.asarray(y[0], dtype=float) / self.scale
        z2 = np.asarray(y[1], dtype=float) / self.scale
        one_minus_sq = lower_gap * upper_gap
        quad = self._quadratic_form(
            theta, lower_gap, upper_gap, np.square(z1 - z2), np.square(z1 + z2), z1 * z2
        ) / one_minus_sq
        return self._log_normalizer(lower_gap, upper_gap) - 0.5 * quad

    def _loglik(self, theta, lower_gap, upper_gap, data: Dataset) -> np.ndarray:
        pairs = np.asarray(data.observations, dtype=float).reshape(-1, 2) / self.scale
        n = len(pairs)
        diff_sq = float(np.sum(np.square(pairs[:, 0] - pairs[:, 1])))
        sum_sq = float(np.sum(np.square(pairs[:, 0] + pairs[:, 1])))
        s12 = float(np.sum(pairs[:, 0] * pairs[:, 1]))
        one_minus_sq = lower_gap * upper_gap
        quad = self._quadratic_form(theta, lower_gap, upper_gap, diff_sq, sum_sq, s12)
        return n * self._log_normalizer(lower_gap, upper_gap) - 0.5 * quad / one_minus_sq

    def neg_entropy(self, theta, lower_gap, upper_gap) -> np.ndarray:
        return self._log_normalizer(lower_gap, upper_gap) - 1.0

    def fisher_closed_form(self, theta, lower_gap, upper_gap) -> np.ndarray:
        return (1.0 + np.square(theta)) / np.square(lower_gap * upper_gap)


class AR1Model(LikelihoodModel):
    """Stationary AR(1) series y_t = b y_{t-1} + sigma e_t, conditional on y_1.

    Parameters are (b, sigma) with b in (-1, 1) and sigma > 0; one observation
    is a (y_prev, y_t) transition.
    """

    label = "ar1"
    parameter_dim = 2

    def __init__(self, T: int):
        if int(T) != T or T < 2:
            raise ModelError(f"AR(1) series length must be >= 2, got {T!r}")
        self.T = int(T)
        super().__init__(
            ParamDomain.open_singular(-1.0, 1.0),
            SampleSpace(domain=ParamDomain(-np.inf, np.inf, True, True), dimension=1),
        )

    @staticmethod
    def check_parameters(b, sigma) -> None:
        b = np.asarray(b, dtype=float)
        if np.any(np.abs(b) >= 1.0) or not np.all(np.isfinite(b)):
            raise DomainError(f"AR(1) coefficient must satisfy |b| < 1, got {b.tolist()!r}")
        if not sigma > 0:
            raise DomainError(f"AR(1) scale must be positive, got {sigma!r}")

    def validate_observation(self, y) -> None:
        if not np.isfinite(y):
            raise ModelError(f"AR(1) observations must be finite reals, got {y!r}")

    def validate(self, data: Dataset) -> None:
        super().validate(data)
        if len(data) != self.T:
            raise ModelError(f"model expects a series of length {self.T}, got {len(data)}")

    def logdensity(self, theta, lower_gap, upper_gap, y) -> np.ndarray:
        b, sigma = theta
        y_prev, y_t = y
        resid = y_t - np.asarray(b, dtype=float) * y_prev
        return -0.5 * _LOG_2PI - np.log(sigma) - 0.5 * (resid / sigma) ** 2

    def per_obs_logdensity(self, theta, y) -> np.ndarray:
        b, sigma = theta
        self.check_parameters(b, sigma)
        return self.logdensity(theta, None, None, y)

    def loglik(self, theta, data: Dataset) -> np.ndarray:
        """Sum of transition log densities t = 2..T, vectorized over b."""
        b, sigma = theta
        self.check_parameters(b, sigma)
        self.validate(data)
        series = np.asarray(data.observations, dtype=float)
        prev, curr = series[:-1], series[1:]
        b = np.asarray(b, dtype=float)
        s_xx = float(np.sum(prev * prev))
        s_xy = float(np.sum(prev * curr))
        s_yy = float(np.sum(curr * curr))
        m = len(curr)
        sse = s_yy - 2.0 * b * s_xy + b * b * s_xx
        return -0.5 * m * (_LOG_2PI + 2.0 * np.log(sigma)) - 0.5 * sse / sigma ** 2

    def loglik_b_on(self, grid: Grid, sigma: float, data: Dataset) -> np.ndarray:
        return self.loglik((grid.nodes, sigma), data)


def bernoulli_model() -> BernoulliModel:
    return BernoulliModel()


def multinomial_model(k: int) -> MultinomialModel:
    return MultinomialModel(k)


def correlation_model(scale: float = 1.0) -> CorrelationModel:
    return CorrelationModel(scale)


def ar1_model(T: int) -> AR1Model:
    return AR1Model(T)


_MULTINOMIAL_LABEL = re.compile(r"^multinomial-(\d+)$")


def model_from_label(label: str, T: Optional[int] = None) -> LikelihoodModel:
    """Resolve "bernoulli", "multinomial-K", "correlation" or "ar1"."""
    if label == "bernoulli":
        return bernoulli_model()
    if label == "correlation":
        return correlation_model()
    if label == "ar1":
        if T is None:
            raise ModelError("the ar1 model needs the series length T")
        return ar1_model(T)
    match = _MULTINOMIAL_LABEL.match(label)
    if match:
        return multinomial_model(int(match.group(1)))
    raise ModelError(f"unknown model label {label!r}")


def _require_scalar_parameter(model: LikelihoodModel, what: str) -> None:
    if model.parameter_dim != 1:
        raise ModelError(f"{what} requires a one-dimensional parameter; {model.label} has {model.parameter_dim}")


def _expectation(model: LikelihoodModel, theta: float, integrand, n: int, sd: float) -> float:
    """E_y[integrand(y)] under the sampling density at a scalar theta."""
    lower_gap, upper_gap = model.theta_domain.gaps(theta)
    if model.sample_space.is_discrete:
        total = 0.0
        for y in model.sample_space.outcomes:
            weight = float(np.exp(model.logdensity(theta, lower_gap, upper_gap, y)))
            if weight > 0.0:
                total += weight * float(integrand(y))
        return total

    if model.sample_space.dimension == 2:
        grid_u, grid_v = model.sample_axes(lower_gap, upper_gap, n, sd)

        def joint(u, v):
            y = model.from_sample_axes(u, v)
            logf = model.logdensity(theta, lower_gap, upper_gap, y)
            return np.exp(logf) * integrand(y)

        return integrate_product(joint, grid_u, grid_v)
    raise ModelError(f"no sample-space quadrature for {model.label}")


def data_density_information(
    model: LikelihoodModel,
    theta,
    method: str = "auto",
    sample_nodes: int = SAMPLE_NODES,
    sample_sd: float = SAMPLE_SD,
) -> float:
    """
    Negative entropy I(theta) of the sampling distribution at theta.

    Args:
        model: Likelihood model
        theta: Parameter point (a vector for the multinomial model with k > 2)
        method: "auto" (closed form when available), "closed_form" or "quadrature"
        sample_nodes: Nodes per axis for continuous sample-space quadrature
        sample_sd: Truncation of the sample space in standard deviations

    Returns:
        Sum or integral of f(y|theta) ln f(y|theta)
    """
    if method not in ("auto", "closed_form", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if isinstance(model, AR1Model):
        raise ModelError("data-density information is not defined here for the AR(1) series model")

    if isinstance(model, MultinomialModel) and model.k > 2:
        return float(model.neg_entropy(theta))

    theta = float(theta)
    domain = model.theta_domain
    if not domain.contains(theta):
        where = "on a singular boundary of" if theta in (domain.lower, domain.upper) else "outside"
        raise DomainError(f"theta {theta!r} lies {where} ({domain.lower}, {domain.upper})")
    lower_gap, upper_gap = domain.gaps(theta)

    closed = model.neg_entropy(theta, lower_gap, upper_gap) if method != "quadrature" else None
    if closed is not None:
        return float(closed)
    if method == "closed_form":
        raise ModelError(f"{model.label} has no closed-form data-density information")

    def log_f(y):
        return model.logdensity(theta, lower_gap, upper_gap, y)

    return _expectation(model, theta, log_f, sample_nodes, sample_sd)


def information_on(model: LikelihoodModel, grid: Grid, sample_nodes: int = SAMPLE_NODES) -> np.ndarray:
    """I(theta) at every grid node, using exact endpoint gaps where possible."""
    _require_scalar_parameter(model, "grid information")
    closed = model.neg_entropy(grid.nodes, grid.lower_gaps, grid.upper_gaps)
    if closed is not None:
        return np.asarray(closed, dtype=float)
    return np.array([
        data_density_information(model, theta, "quadrature", sample_nodes) for theta in grid.nodes
    ])


def _second_derivative(model, theta, lower_gap, upper_gap, h, y) -> np.ndarray:
    """Central second difference in theta, moving the gaps with theta."""
    f0 = model.logdensity(theta, lower_gap, upper_gap, y)
    fp = model.logdensity(theta + h, lower_gap + h, upper_gap - h, y)
    fm = model.logdensity(theta - h, lower_gap - h, upper_gap + h, y)
    return (fp - 2.0 * f0 + fm) / (h * h)


def _richardson_second_derivative(model, theta, lower_gap, upper_gap, h, y) -> np.ndarray:
    coarse = _second_derivative(model, theta, lower_gap, upper_gap, h, y)
    fine = _second_derivative(model, theta, lower_gap, upper_gap, 0.5 * h, y)
    return (4.0 * fine - coarse) / 3.0


def fisher_information_at(
    model: LikelihoodModel,
    theta: np.ndarray,
    lower_gap: np.ndarray,
    upper_gap: np.ndarray,
    h,
    sample_nodes: int = SAMPLE_NODES,
    sample_sd: float = SAMPLE_SD,
) -> np.ndarray:
    """
    Fisher information with per-point steps and caller-supplied gaps.

    No step-range or boundary checks; jeffreys_rule_prior uses it with steps
    shrunk toward the endpoints.
    """
    theta = np.asarray(theta, dtype=float)
    h = np.broadcast_to(np.asarray(h, dtype=float), theta.shape)
    if model.sample_space.is_discrete:
        total = np.zeros(theta.shape)
        for y in model.sample_space.outcomes:
            weight = np.exp(model.logdensity(theta, lower_gap, upper_gap, y))
            curvature = _richardson_second_derivative(model, theta, lower_gap, upper_gap, h, y)
            total = total - np.where(weight > 0, weight * curvature, 0.0)
        return total

    values = np.empty(theta.shape)
    for idx in np.ndindex(theta.shape):
        t, lo, up, step = float(theta[idx]), float(lower_gap[idx]), float(upper_gap[idx]), float(h[idx])

        def curvature(y, t=t, lo=lo, up=up, step=step):
            return -_richardson_second_derivative(model, t, lo, up, step, y)

        values[idx] = _expectation(model, t, curvature, sample_nodes, sample_sd)
    return values


def fisher_information(
    model: LikelihoodModel,
    theta: float,
    h: float = DEFAULT_FD_STEP,
    sample_nodes: int = SAMPLE_NODES,
    sample_sd: float = SAMPLE_SD,
) -> float:
    """
    Expected negative second derivative of the per-observation log density.

    Args:
        model: Model with a one-dimensional parameter
        theta: Interior parameter value
        h: Finite-difference step in [1e-6, 1e-3], refined once by Richardson
        sample_nodes: Nodes per axis for continuous sample spaces
        sample_sd: Sample-space truncation in standard deviations

    Returns:
        Fisher information at theta
    """
    _require_scalar_parameter(model, "fisher_information")
    if not FD_STEP_RANGE[0] <= h <= FD_STEP_RANGE[1]:
        raise ValueError(f"finite-difference step must lie in {list(FD_STEP_RANGE)}, got {h!r}")
    lower_gap, upper_gap = model.theta_domain.gaps(theta)
    if not (lower_gap > 2 * h and upper_gap > 2 * h):
        raise DomainError(f"theta {theta!r} lies within 2h = {2 * h!r} of a boundary")
    value = fisher_information_at(
        model, np.asarray(theta, dtype=float), lower_gap, upper_gap, h, sample_nodes, sample_sd
    )
    return float(value)


def simulate_ar1(T: int, b: float, sigma: float, seed: int) -> Dataset:
    """Seeded stationary AR(1) series of length T."""
    if int(T) != T or T < 2:
        raise ModelError(f"series length must be >= 2, got {T!r}")
    AR1Model.check_parameters(b, sigma)
    rng = np.random.default_rng(seed)
    series = np.empty(int(T))
    series[0] = rng.normal(0.0, sigma / np.sqrt(1.0 - b * b))
    shocks = rng.normal(0.0, sigma, int(T) - 1)
    for t in range(1, int(T)):
        series[t] = b * series[t - 1] + shocks[t - 1]
    logger.debug("simulated AR(1) series T=%d b=%g sigma=%g seed=%d", T, b, sigma, seed)
    return Dataset(tuple(float(v) for v in series), "ar1")


def observations_from_sequence(model: LikelihoodModel, values: Sequence) -> Dataset:
    """Wrap raw observations as a validated dataset for ``model``."""
    data = Dataset(tuple(values), model.label)
    model.validate(data)
    return data
