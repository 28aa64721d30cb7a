import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import xlogy

from priorlab.core.inference import (
    EFFICIENCY_TOL,
    ar1_posterior_b,
    info_delta,
    likelihood_only_output,
    optimal_output,
    posterior,
    random_candidates,
    rule_of_succession,
)
from priorlab.core.models import Dataset, simulate_ar1
from priorlab.core.numerics import (
    TANH_SINH,
    UNIT_INTERVAL,
    GriddedDensity,
    ParamDomain,
    build_grid,
    kl_divergence,
)
from priorlab.core.priors import (
    PriorMeasure,
    arcsine_prior,
    beta_prior,
    haldane_prior,
    jeffreys_binomial_prior,
    jeffreys_mixed_prior,
    laplace_uniform,
    tabulated_prior,
)
from priorlab.exceptions import (
    AtomsNotSupportedError,
    DomainError,
    ImproperMeasureError,
    ImproperPosteriorError,
    SupportError,
    ZeroMarginalError,
)

DATA_3_1 = Dataset.from_counts(3, 1)


def _mdip_kernel(p):
    return np.exp(xlogy(p, p) + xlogy(1.0 - p, 1.0 - p))


def _mdip_succession(n):
    numerator = quad(lambda p: p ** (n + 1) * _mdip_kernel(p), 0.0, 1.0, epsabs=0.0, epsrel=1e-12)[0]
    denominator = quad(lambda p: p ** n * _mdip_kernel(p), 0.0, 1.0, epsabs=0.0, epsrel=1e-12)[0]
    return numerator / denominator


# =============================================================================
# POSTERIORS
# =============================================================================


def test_uniform_posterior_is_beta(bernoulli, unit_grid):
    result = posterior(laplace_uniform(UNIT_INTERVAL), bernoulli, DATA_3_1, unit_grid)
    p = unit_grid.lower_gaps
    np.testing.assert_allclose(result.density.values, 20.0 * p ** 3 * unit_grid.upper_gaps, rtol=1e-12, atol=1e-300)
    assert result.marginal == pytest.approx(0.05, rel=1e-12)
    assert result.log_marginal == pytest.approx(np.log(0.05), rel=1e-12)
    assert result.mean() == pytest.approx(2.0 / 3.0, rel=1e-12)
    assert result.sd() == pytest.approx(np.sqrt(8.0 / 252.0), rel=1e-10)
    assert result.total_mass() == pytest.approx(1.0, abs=1e-13)
    assert result.data_summary == "3 successes, 1 failures"


def test_mixed_posterior_atoms(bernoulli, unit_grid):
    result = posterior(jeffreys_mixed_prior(0.25, 0.25), bernoulli, Dataset.from_counts(3), unit_grid)
    (zero, zero_mass), (one, one_mass) = result.atoms
    assert (zero, zero_mass) == (0.0, 0.0)
    assert one == 1.0 and one_mass == pytest.approx(2.0 / 3.0, rel=1e-12)
    np.testing.assert_allclose(
        result.density.values, 0.5 * unit_grid.lower_gaps ** 3 / 0.375, rtol=1e-12, atol=1e-300
    )
    assert not result.density.normalized
    assert result.total_mass() == pytest.approx(1.0, abs=1e-13)
    assert result.mean() == pytest.approx(0.35 / 0.375, rel=1e-12)


@pytest.mark.parametrize("make_prior", [
    lambda mdip: laplace_uniform(UNIT_INTERVAL),
    lambda mdip: jeffreys_binomial_prior(),
    lambda mdip: mdip,
])
def test_posterior_ignores_prior_scale(bernoulli, unit_grid, bernoulli_mdip, make_prior):
    prior = make_prior(bernoulli_mdip)
    base = posterior(prior, bernoulli, DATA_3_1, unit_grid)
    scaled = posterior(prior.scaled(7.0), bernoulli, DATA_3_1, unit_grid)
    assert scaled.marginal == pytest.approx(7.0 * base.marginal, rel=1e-12)
    np.testing.assert_allclose(scaled.density.values, base.density.values, rtol=1e-12, atol=1e-300)


def test_arcsine_marginal_on_gauss_legendre_grid(correlation, rho_grid):
    result = posterior(arcsine_prior(), correlation, Dataset((), "correlation"), rho_grid)
    assert result.marginal == pytest.approx(1.0, abs=1e-10)
    assert result.total_mass() == pytest.approx(1.0, abs=1e-12)


def test_efficiency_on_gauss_legendre_grid(correlation, rho_grid):
    data = Dataset(((0.5, 0.4), (-1.0, -0.8), (1.5, 1.1)), "correlation")
    prior = arcsine_prior()
    best = optimal_output(prior, correlation, data, rho_grid)
    assert abs(info_delta(best, prior, correlation, data).delta) <= EFFICIENCY_TOL


def test_haldane_posterior_with_both_outcomes(bernoulli, unit_grid):
    result = posterior(haldane_prior(), bernoulli, Dataset.from_counts(1, 1), unit_grid)
    np.testing.assert_allclose(result.density.values, 1.0, rtol=1e-12)
    assert result.marginal == pytest.approx(1.0, rel=1e-12)
    assert not result.prior_normalized


@pytest.mark.parametrize("successes, failures", [(3, 0), (0, 2), (0, 0)])
def test_haldane_posterior_improper(bernoulli, unit_grid, successes, failures):
    with pytest.raises(ImproperPosteriorError, match="improper posterior"):
        posterior(haldane_prior(), bernoulli, Dataset.from_counts(successes, failures), unit_grid)


def test_zero_marginal(bernoulli, unit_grid):
    point_at_zero = PriorMeasure("point-zero", UNIT_INTERVAL, None, atoms=((0.0, 1.0),), proper=True)
    with pytest.raises(ZeroMarginalError):
        posterior(point_at_zero, bernoulli, Dataset.from_counts(1), unit_grid)


def test_posterior_rejects_foreign_grid(bernoulli, rho_grid):
    with pytest.raises(DomainError):
        posterior(laplace_uniform(UNIT_INTERVAL), bernoulli, DATA_3_1, rho_grid)


def test_posterior_as_prior_updates_sequentially(bernoulli, unit_grid):
    first = posterior(laplace_uniform(UNIT_INTERVAL), bernoulli, Dataset.from_counts(2), unit_grid)
    second = posterior(first.as_prior(), bernoulli, Dataset.from_counts(1, 1), unit_grid)
    direct = posterior(laplace_uniform(UNIT_INTERVAL), bernoulli, DATA_3_1, unit_grid)
    np.testing.assert_allclose(second.density.values, direct.density.values, rtol=1e-10, atol=1e-300)


# =============================================================================
# RULE OF SUCCESSION
# =============================================================================


@pytest.mark.parametrize("n", [0, 1, 2, 5, 10, 100])
def test_succession_uniform(n):
    assert rule_of_succession(laplace_uniform(UNIT_INTERVAL), n) == pytest.approx((n + 1) / (n + 2), rel=1e-13)


@pytest.mark.parametrize("n", [0, 1, 4, 10])
def test_succession_jeffreys_closed_form(n):
    assert rule_of_succession(jeffreys_binomial_prior(), n) == pytest.approx((n + 0.5) / (n + 1), rel=1e-13)


@pytest.mark.parametrize("n, tol", [(0, 1e-7), (1, 1e-7), (4, 1e-7), (10, 1e-7), (100, 1e-6)])
def test_succession_jeffreys_rule(bernoulli_jeffreys, n, tol):
    assert abs(rule_of_succession(bernoulli_jeffreys, n) - (n + 0.5) / (n + 1)) < tol


def test_succession_mdip_symmetric_start(bernoulli_mdip):
    assert abs(rule_of_succession(bernoulli_mdip, 0) - 0.5) < 1e-12


@pytest.mark.parametrize("n", [1, 3, 5, 10])
def test_succession_mdip(bernoulli_mdip, n):
    value = rule_of_succession(bernoulli_mdip, n)
    assert abs(value - _mdip_succession(n)) < 1e-8
    # more prior weight near the ends than the uniform prior
    assert (n + 1) / (n + 2) < value < 1.0


@pytest.mark.parametrize("n, expected", [(0, 0.5), (1, 5.0 / 6.0), (2, 0.9), (3, 0.35 / 0.375)])
def test_succession_mixed(n, expected):
    assert rule_of_succession(jeffreys_mixed_prior(0.25, 0.25), n) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("n", [0, 1, 3])
def test_succession_haldane_improper(n):
    with pytest.raises(ImproperPosteriorError):
        rule_of_succession(haldane_prior(), n)


@pytest.mark.parametrize("n, expected", [(0, 0.5), (1, 1.0), (3, 1.0)])
def test_succession_haldane_limit(n, expected):
    assert rule_of_succession(haldane_prior(), n, limit=True) == expected


def test_succession_approaches_haldane_limit():
    values = [rule_of_succession(beta_prior(eps, eps), 1) for eps in (0.1, 0.01, 0.001, 1e-6)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert 1.0 - values[-1] < 2e-6


def test_succession_rejects_arguments():
    with pytest.raises(ValueError):
        rule_of_succession(laplace_uniform(UNIT_INTERVAL), -1)
    with pytest.raises(DomainError):
        rule_of_succession(arcsine_prior(), 2)


# =============================================================================
# INFORMATION PROCESSING
# =============================================================================


def test_posterior_is_fully_efficient(bernoulli, unit_grid):
    prior = laplace_uniform(UNIT_INTERVAL)
    report = info_delta(optimal_output(prior, bernoulli, DATA_3_1, unit_grid), prior, bernoulli, DATA_3_1)
    assert abs(report.delta) <= EFFICIENCY_TOL
    assert report.efficiency == 1.0
    assert report.as_dict()["candidate"] == "candidate"


def test_posterior_efficient_under_jeffreys(bernoulli, unit_grid):
    prior = jeffreys_binomial_prior()
    report = info_delta(optimal_output(prior, bernoulli, DATA_3_1, unit_grid), prior, bernoulli, DATA_3_1)
    assert abs(report.delta) <= EFFICIENCY_TOL
    assert report.efficiency == 1.0


def test_perturbed_candidates_lose_information(bernoulli, unit_grid):
    prior = laplace_uniform(UNIT_INTERVAL)
    best = optimal_output(prior, bernoulli, DATA_3_1, unit_grid)
    for candidate in random_candidates(best, 20, np.random.default_rng(7)):
        report = info_delta(candidate, prior, bernoulli, DATA_3_1, label="perturbed")
        assert report.delta > EFFICIENCY_TOL
        assert report.efficiency < 1.0
        assert report.delta == pytest.approx(kl_divergence(candidate, best), abs=1e-9)


EFFICIENCY_SCENARIOS = [
    ("uniform", Dataset.from_counts(3, 1)),
    ("uniform", Dataset.from_counts(0, 5)),
    ("jeffreys", Dataset.from_counts(3, 1)),
    ("mdip", Dataset.from_counts(1, 0)),
    ("beta", Dataset.from_counts(7, 2)),
]


@pytest.mark.parametrize("kind, data", EFFICIENCY_SCENARIOS)
def test_efficiency_is_a_kl_identity(bernoulli, unit_grid, bernoulli_mdip, kind, data):
    prior = {
        "uniform": laplace_uniform(UNIT_INTERVAL),
        "jeffreys": jeffreys_binomial_prior(),
        "mdip": bernoulli_mdip,
        "beta": beta_prior(2.0, 3.0),
    }[kind]
    best = optimal_output(prior, bernoulli, data, unit_grid)
    assert info_delta(best, prior, bernoulli, data).delta <= EFFICIENCY_TOL
    for candidate in random_candidates(best, 100, np.random.default_rng(11)):
        report = info_delta(candidate, prior, bernoulli, data, label="perturbed")
        assert report.delta >= -EFFICIENCY_TOL
        assert abs(report.delta - kl_divergence(candidate, best)) <= 1e-8


def test_random_candidates_are_seeded(unit_grid):
    reference = GriddedDensity.from_values(unit_grid, np.ones(len(unit_grid)))
    first = [c.values for c in random_candidates(reference, 5, np.random.default_rng(3))]
    second = [c.values for c in random_candidates(reference, 5, np.random.default_rng(3))]
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a, b)
        assert abs(float(np.sum(unit_grid.weights * a)) - 1.0) < 1e-12


@pytest.mark.parametrize("successes, failures", [(3, 1), (0, 4), (10, 7)])
def test_likelihood_only_output_without_prior_term(bernoulli, unit_grid, successes, failures):
    data = Dataset.from_counts(successes, failures)
    candidate = likelihood_only_output(bernoulli, data, unit_grid)
    report = info_delta(candidate, None, bernoulli, data, include_prior=False)
    assert abs(report.delta) <= EFFICIENCY_TOL


def test_likelihood_only_output_is_inefficient_under_jeffreys(bernoulli, unit_grid):
    prior = jeffreys_binomial_prior()
    candidate = likelihood_only_output(bernoulli, DATA_3_1, unit_grid)
    report = info_delta(candidate, prior, bernoulli, DATA_3_1, label="likelihood-only")
    best = optimal_output(prior, bernoulli, DATA_3_1, unit_grid)
    assert report.delta > EFFICIENCY_TOL
    assert report.delta == pytest.approx(kl_divergence(candidate, best), abs=1e-9)


def test_likelihood_only_output_improper(correlation):
    grid = build_grid(ParamDomain.open_singular(-1.0, 1.0), 512, TANH_SINH)
    data = Dataset(((1.0, 1.0), (2.0, 2.0)), "correlation")
    with pytest.raises(ImproperPosteriorError):
        likelihood_only_output(correlation, data, grid)


def test_optimal_output_rejects_atoms_and_improper(bernoulli, unit_grid):
    with pytest.raises(AtomsNotSupportedError):
        optimal_output(jeffreys_mixed_prior(0.25, 0.25), bernoulli, DATA_3_1, unit_grid)
    with pytest.raises(ImproperMeasureError):
        optimal_output(haldane_prior(), bernoulli, DATA_3_1, unit_grid)


def test_info_delta_support_error(bernoulli, unit_grid):
    upper_half = tabulated_prior(unit_grid, np.where(unit_grid.lower_gaps >= 0.5, 2.0, 0.0))
    flat = GriddedDensity.from_values(unit_grid, np.ones(len(unit_grid)))
    with pytest.raises(SupportError):
        info_delta(flat, upper_half, bernoulli, DATA_3_1)


# =============================================================================
# AR(1)
# =============================================================================


def test_ar1_flat_data_follows_prior(rho_grid):
    data = Dataset((0.0, 0.0), "ar1")
    jeffreys = ar1_posterior_b(data, 1.0, "jeffreys", rho_grid)
    mdip = ar1_posterior_b(data, 1.0, "mdip", rho_grid)
    jeffreys_mode = rho_grid.nodes[int(np.argmax(jeffreys.density.values))]
    mdip_mode = rho_grid.nodes[int(np.argmax(mdip.density.values))]
    assert abs(jeffreys_mode) > 0.99
    assert abs(mdip_mode) < 0.01
    assert jeffreys.total_mass() == pytest.approx(1.0, abs=1e-12)


def test_ar1_long_series_priors_agree(rho_grid):
    data = simulate_ar1(500, 0.5, 1.0, seed=11)
    jeffreys = ar1_posterior_b(data, 1.0, "jeffreys", rho_grid)
    mdip = ar1_posterior_b(data, 1.0, "mdip", rho_grid)
    assert abs(jeffreys.mean() - mdip.mean()) < 0.02
    assert abs(mdip.mean() - 0.5) < 0.1
    assert abs(jeffreys.mean() - 0.5) < 0.1
    assert mdip.sd() < 0.1


def test_ar1_posterior_needs_symmetric_grid(unit_grid):
    with pytest.raises(DomainError):
        ar1_posterior_b(Dataset((0.0, 1.0), "ar1"), 1.0, "mdip", unit_grid)
