import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from scipy.stats import norm

from priorlab.core.models import (
    AR1Model,
    Dataset,
    ar1_model,
    bernoulli_model,
    correlation_model,
    data_density_information,
    fisher_information,
    model_from_label,
    multinomial_model,
    observations_from_sequence,
    simulate_ar1,
)
from priorlab.core.numerics import GAUSS_LEGENDRE, ParamDomain, build_grid, integrate_product
from priorlab.exceptions import DomainError, ModelError

LOG_2PI = np.log(2.0 * np.pi)


# =============================================================================
# BERNOULLI AND MULTINOMIAL
# =============================================================================


def test_bernoulli_logdensity(bernoulli):
    assert bernoulli.per_obs_logdensity(0.5, 1) == pytest.approx(np.log(0.5), abs=1e-15)
    assert bernoulli.per_obs_logdensity(0.3, 0) == pytest.approx(np.log(0.7), abs=1e-15)


def test_bernoulli_loglik_counts(bernoulli):
    data = Dataset.from_counts(5)
    np.testing.assert_allclose(bernoulli.loglik([0.2, 0.9], data), 5 * np.log([0.2, 0.9]), rtol=1e-14)


def test_bernoulli_rejects_bad_outcome(bernoulli):
    with pytest.raises(ModelError):
        bernoulli.validate(Dataset((1, 2), "bernoulli"))
    with pytest.raises(ModelError):
        bernoulli.validate(Dataset((1,), "correlation"))


@given(st.floats(1e-6, 1 - 1e-6))
@settings(max_examples=25, deadline=None)
def test_bernoulli_sums_to_one(p):
    model = bernoulli_model()
    assert abs(sum(float(model.density(p, y)) for y in (0, 1)) - 1.0) < 1e-10


@given(st.floats(0.01, 0.98), st.floats(0.0, 0.99))
@settings(max_examples=25, deadline=None)
def test_multinomial_sums_to_one(p1, share):
    model = multinomial_model(3)
    theta = np.array([p1, share * (1.0 - p1)])
    assert abs(sum(float(model.density(theta, y)) for y in range(3)) - 1.0) < 1e-10


@pytest.mark.parametrize("p", [1e-9, 0.1, 0.37, 0.5, 0.99])
@pytest.mark.parametrize("y", [0, 1])
def test_two_category_multinomial_is_bernoulli(bernoulli, p, y):
    multinomial = multinomial_model(2)
    assert abs(float(multinomial.per_obs_logdensity(p, y)) - float(bernoulli.per_obs_logdensity(p, y))) < 1e-14


def test_two_category_multinomial_loglik(bernoulli):
    grid = build_grid(ParamDomain.closed(0.0, 1.0), 64, GAUSS_LEGENDRE)
    data = Dataset((1, 1, 0, 1), "multinomial-2")
    expected = bernoulli.loglik_on(grid, Dataset((1, 1, 0, 1), "bernoulli"))
    np.testing.assert_allclose(multinomial_model(2).loglik_on(grid, data), expected, rtol=1e-14)


@pytest.mark.parametrize("theta, expected", [
    ((1 / 3, 1 / 3), (1 / 3, 1 / 3, 1 / 3)),
    ((0.5, 0.2), (0.5, 0.2, 0.3)),
])
def test_three_category_densities(theta, expected):
    model = multinomial_model(3)
    # outcome 0 carries the remainder
    values = [float(model.density(np.array(theta), y)) for y in (1, 2, 0)]
    np.testing.assert_allclose(values, expected, rtol=1e-14)


def test_multinomial_outside_simplex():
    with pytest.raises(DomainError):
        multinomial_model(3).per_obs_logdensity(np.array([0.8, 0.5]), 1)


def test_multinomial_rejects_scalar_parameter():
    with pytest.raises(ModelError, match="expects 2 parameters"):
        data_density_information(multinomial_model(3), 0.3)


@pytest.mark.parametrize("k", [1, 0, 2.5])
def test_multinomial_needs_two_categories(k):
    with pytest.raises(ModelError):
        multinomial_model(k)


# =============================================================================
# CORRELATION
# =============================================================================


def test_correlation_at_origin(correlation):
    assert float(correlation.per_obs_logdensity(0.0, (0.0, 0.0))) == pytest.approx(-LOG_2PI, abs=1e-15)


def test_correlation_density_integrates_to_one(correlation):
    grid = build_grid(ParamDomain.closed(-10.0, 10.0), 200, GAUSS_LEGENDRE)
    total = integrate_product(lambda y1, y2: correlation.density(0.5, (y1, y2)), grid, grid)
    assert abs(total - 1.0) < 1e-4


@given(st.floats(-0.999, 0.999))
@settings(max_examples=25, deadline=None)
def test_correlation_sample_axes_hold_unit_mass(rho):
    model = correlation_model()
    grid_u, grid_v = model.sample_axes(*model.theta_domain.gaps(rho))
    total = integrate_product(lambda u, v: model.density(rho, model.from_sample_axes(u, v)), grid_u, grid_v)
    assert abs(total - 1.0) < 1e-6


@pytest.mark.parametrize("rho", [0.99, -0.995, 0.999, -0.9999])
def test_correlation_sample_axes_follow_the_diagonal(correlation, rho):
    grid_u, grid_v = correlation.sample_axes(*correlation.theta_domain.gaps(rho))
    total = integrate_product(
        lambda u, v: correlation.density(rho, correlation.from_sample_axes(u, v)), grid_u, grid_v
    )
    assert abs(total - 1.0) < 1e-6
    assert grid_u.domain.upper == pytest.approx(8.0 * np.sqrt(1.0 + rho), rel=1e-14)
    assert grid_v.domain.upper == pytest.approx(8.0 * np.sqrt(1.0 - rho), rel=1e-14)


@pytest.mark.parametrize("rho", [-0.9, 0.0, 0.4])
@pytest.mark.parametrize("pair", [(0.3, -1.2), (2.0, 0.5)])
def test_correlation_symmetric_in_coordinates(correlation, rho, pair):
    swapped = (pair[1], pair[0])
    assert float(correlation.density(rho, pair)) == pytest.approx(float(correlation.density(rho, swapped)), rel=1e-14)


def test_correlation_loglik_matches_sum(correlation):
    pairs = ((0.3, 0.1), (-1.0, -0.7), (2.2, 1.5))
    data = Dataset(pairs, "correlation")
    expected = sum(float(correlation.per_obs_logdensity(0.6, y)) for y in pairs)
    assert float(correlation.loglik(0.6, data)) == pytest.approx(expected, rel=1e-13)


def test_correlation_rejects_non_finite_pair(correlation):
    with pytest.raises(ModelError):
        correlation.validate(Dataset(((0.0, np.nan),), "correlation"))


# =============================================================================
# AR(1)
# =============================================================================


def test_ar1_zero_series():
    data = Dataset((0.0, 0.0, 0.0), "ar1")
    assert float(ar1_model(3).loglik((0.0, 1.0), data)) == pytest.approx(-LOG_2PI, abs=1e-14)


def test_ar1_zero_residuals():
    data = Dataset((1.0, 0.5, 0.25), "ar1")
    assert float(ar1_model(3).loglik((0.5, 1.0), data)) == pytest.approx(-LOG_2PI, abs=1e-14)


def test_ar1_loglik_matches_direct_sum():
    data = simulate_ar1(50, 0.7, 1.3, seed=3)
    series = np.array(data.observations)
    expected = float(np.sum(norm.logpdf(series[1:], 0.7 * series[:-1], 1.3)))
    assert abs(float(ar1_model(50).loglik((0.7, 1.3), data)) - expected) < 1e-10


@pytest.mark.parametrize("b, sigma", [(1.0, 1.0), (-1.2, 1.0), (0.3, 0.0), (0.3, -2.0)])
def test_ar1_rejects_parameters(b, sigma):
    with pytest.raises(DomainError):
        ar1_model(3).loglik((b, sigma), Dataset((0.0, 1.0, 0.0), "ar1"))


def test_ar1_rejects_wrong_length():
    with pytest.raises(ModelError):
        ar1_model(4).loglik((0.1, 1.0), Dataset((0.0, 1.0), "ar1"))


def test_ar1_needs_two_points():
    with pytest.raises(ModelError):
        AR1Model(1)


def test_simulation_is_seeded():
    assert simulate_ar1(20, 0.5, 1.0, seed=9) == simulate_ar1(20, 0.5, 1.0, seed=9)
    assert simulate_ar1(20, 0.5, 1.0, seed=9) != simulate_ar1(20, 0.5, 1.0, seed=10)
    assert len(simulate_ar1(20, 0.5, 1.0, seed=9)) == 20


# =============================================================================
# DATA-DENSITY INFORMATION
# =============================================================================


def test_bernoulli_information_at_half(bernoulli):
    assert data_density_information(bernoulli, 0.5) == pytest.approx(-np.log(2.0), abs=1e-15)


@pytest.mark.parametrize("p", [1e-12, 1 - 1e-12])
def test_bernoulli_information_vanishes_at_ends(bernoulli, p):
    assert abs(data_density_information(bernoulli, p)) < 1e-10


@given(st.floats(1e-6, 0.5))
@settings(max_examples=50, deadline=None)
def test_bernoulli_information_symmetric(p):
    model = bernoulli_model()
    assert abs(data_density_information(model, p) - data_density_information(model, 1.0 - p)) < 1e-12


def test_bernoulli_information_minimum_at_half(bernoulli):
    points = np.linspace(0.05, 0.95, 19)
    values = [data_density_information(bernoulli, p) for p in points]
    assert points[int(np.argmin(values))] == pytest.approx(0.5)
    assert min(values) == pytest.approx(-np.log(2.0), abs=1e-15)


@pytest.mark.parametrize("rho", [0.0, 0.8])
def test_correlation_information(correlation, rho):
    expected = -np.log(2.0 * np.pi * np.e) - 0.5 * np.log(1.0 - rho ** 2)
    assert data_density_information(correlation, rho) == pytest.approx(expected, abs=1e-12)
    assert abs(data_density_information(correlation, rho, method="quadrature") - expected) < 1e-4


@pytest.mark.parametrize("rho", [0.99, -0.995, 0.999])
def test_correlation_information_quadrature_near_endpoints(correlation, rho):
    closed = data_density_information(correlation, rho)
    assert abs(data_density_information(correlation, rho, method="quadrature") - closed) < 1e-8


@pytest.mark.parametrize("rho", [-1.0, 1.0, 1.5])
def test_correlation_information_rejects_boundary(correlation, rho):
    with pytest.raises(DomainError):
        data_density_information(correlation, rho)


@pytest.mark.parametrize("scale", [2.0, 10.0])
@pytest.mark.parametrize("rho", [-0.9, -0.3, 0.0, 0.5, 0.95])
def test_correlation_information_shifts_under_scaling(correlation, scale, rho):
    scaled = correlation_model(scale)
    shift = -np.log(scale ** 2)
    closed = data_density_information(scaled, rho) - data_density_information(correlation, rho)
    assert closed == pytest.approx(shift, abs=1e-12)
    quadrature = (
        data_density_information(scaled, rho, method="quadrature")
        - data_density_information(correlation, rho, method="quadrature")
    )
    assert abs(quadrature - shift) < 1e-4


def test_information_closed_form_unavailable():
    class NoClosedForm(type(correlation_model())):
        def neg_entropy(self, theta, lower_gap, upper_gap):
            return None

    with pytest.raises(ModelError):
        data_density_information(NoClosedForm(), 0.2, method="closed_form")


def test_information_undefined_for_ar1():
    with pytest.raises(ModelError):
        data_density_information(ar1_model(5), 0.3)


# =============================================================================
# FISHER INFORMATION
# =============================================================================


def test_fisher_bernoulli_examples(bernoulli):
    assert abs(fisher_information(bernoulli, 0.5) - 4.0) < 1e-4
    assert abs(fisher_information(bernoulli, 0.2) - 6.25) < 1e-3


@pytest.mark.parametrize("p", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
def test_fisher_bernoulli_closed_form(bernoulli, p):
    assert fisher_information(bernoulli, p) == pytest.approx(1.0 / (p * (1.0 - p)), rel=1e-3)


@pytest.mark.parametrize("p", [0.05, 0.2, 0.33])
def test_fisher_bernoulli_symmetric(bernoulli, p):
    assert abs(fisher_information(bernoulli, p) - fisher_information(bernoulli, 1.0 - p)) < 1e-5


@pytest.mark.parametrize("rho", [-0.5, 0.0, 0.3])
def test_fisher_correlation_by_quadrature(correlation, rho):
    expected = (1.0 + rho ** 2) / (1.0 - rho ** 2) ** 2
    assert fisher_information(correlation, rho) == pytest.approx(expected, rel=1e-4)


@pytest.mark.parametrize("rho", [0.99, -0.99, 0.95])
def test_fisher_correlation_near_endpoints(correlation, rho):
    expected = (1.0 + rho ** 2) / (1.0 - rho ** 2) ** 2
    assert fisher_information(correlation, rho) == pytest.approx(expected, rel=1e-5)


@pytest.mark.parametrize("h", [1e-7, 2e-3])
def test_fisher_step_range(bernoulli, h):
    with pytest.raises(ValueError):
        fisher_information(bernoulli, 0.5, h=h)


def test_fisher_rejects_near_boundary(bernoulli):
    with pytest.raises(DomainError):
        fisher_information(bernoulli, 1e-4, h=1e-4)


def test_fisher_needs_scalar_parameter():
    with pytest.raises(ModelError):
        fisher_information(multinomial_model(3), 0.3)


# =============================================================================
# LABELS
# =============================================================================


@pytest.mark.parametrize("label, expected", [
    ("bernoulli", "bernoulli"),
    ("correlation", "correlation"),
    ("multinomial-4", "multinomial-4"),
])
def test_model_from_label(label, expected):
    assert model_from_label(label).label == expected


def test_model_from_label_rejects():
    with pytest.raises(ModelError):
        model_from_label("poisson")
    with pytest.raises(ModelError):
        model_from_label("ar1")
    assert model_from_label("ar1", T=7).T == 7


def test_observations_from_sequence(bernoulli):
    assert len(observations_from_sequence(bernoulli, [1, 0, 1])) == 3
    with pytest.raises(ModelError):
        observations_from_sequence(bernoulli, [1, 3])


def test_dataset_extended():
    joined = Dataset.from_counts(2).extended(Dataset.from_counts(0, 1))
    assert joined.observations == (1, 1, 0)
    with pytest.raises(ModelError):
        Dataset.from_counts(1).extended(Dataset((0.0,), "ar1"))
