import json
import math
import numpy as np
import pytest

from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from pdf_forge.core.exceptions import InvalidModelError
from pdf_forge.engine.maxent import (
    ChebyshevBasis,
    build_model,
    chebyshev_vector,
    density,
    load_model_record,
    log_density_unnorm,
    model_record_json,
    normalize,
    spectral_weight,
    to_original_scale,
)
from pdf_forge.engine.quadrature import simpson_integrate, uniform_grid
from pdf_forge.models.density import LagrangeVector
from pdf_forge.models.sample import DomainSpec, SymmetryOption

GRID = uniform_grid(401)


def flat_model(domain: DomainSpec, symmetry: SymmetryOption = SymmetryOption()):
    return build_model(LagrangeVector(), GRID, domain, symmetry)


class TestChebyshev:
    def test_first_polynomials(self):
        x = np.linspace(-1.0, 1.0, 9)
        t = chebyshev_vector(3, x)
        assert t.shape == (9, 3)
        assert_allclose(t[:, 0], x)
        assert_allclose(t[:, 1], 2 * x ** 2 - 1, atol=1e-15)
        assert_allclose(t[:, 2], 4 * x ** 3 - 3 * x, atol=1e-14)

    def test_zero_dimension_is_empty(self):
        assert chebyshev_vector(0, np.zeros(4)).shape == (4, 0)

    def test_bounded_by_one(self):
        x = np.linspace(-1.0, 1.0, 101)
        assert np.all(np.abs(chebyshev_vector(40, x)) <= 1.0 + 1e-12)

    def test_outside_interval_is_rejected(self):
        with pytest.raises(ValueError):
            chebyshev_vector(2, np.array([1.5]))

    def test_basis_widens_on_demand(self):
        x = np.linspace(-1.0, 1.0, 7)
        basis = ChebyshevBasis(x, dimension=1)
        assert_allclose(basis.matrix(5), chebyshev_vector(5, x))
        lambdas = np.array([0.5, -0.25, 0.125])
        assert_allclose(basis.log_density_unnorm(lambdas), log_density_unnorm(LagrangeVector.from_array(lambdas), x))
        assert_allclose(basis.log_density_unnorm(np.array([])), np.zeros(7))


def test_flat_model_normalizes_to_half():
    assert_allclose(normalize(LagrangeVector(), GRID), -math.log(2.0), rtol=1e-14)


@given(st.lists(st.floats(-8.0, 8.0), min_size=0, max_size=8))
def test_models_integrate_to_one_on_their_grid(lambdas):
    lagrange = LagrangeVector(lambdas=tuple(lambdas))
    model = build_model(lagrange, GRID, DomainSpec(a=0.0, b=1.0, total_count=10))
    assert_allclose(simpson_integrate(GRID, lambda x: density(model, x)), 1.0, rtol=1e-9)


def test_large_multipliers_do_not_overflow():
    model = build_model(LagrangeVector(lambdas=(900.0,)), GRID, DomainSpec(a=0.0, b=1.0, total_count=10))
    assert np.isfinite(model.log_norm)
    assert np.isfinite(density(model, 1.0))
    assert density(model, -1.0) == model.epsilon


def test_spectral_weight():
    assert spectral_weight(LagrangeVector(lambdas=(3.0, -1.0))) == 0.75
    assert spectral_weight(LagrangeVector()) == 0.0


class TestModelRecord:
    model = build_model(
        LagrangeVector(lambdas=(0.1, -0.7, 0.3)),
        GRID,
        DomainSpec(a=-2.5, b=4.0, total_count=500, discarded_high=2, censored=True),
    )

    def test_round_trip_is_exact(self):
        loaded = load_model_record(model_record_json(self.model))
        assert loaded == self.model
        assert loaded.lagrange.lambdas == self.model.lagrange.lambdas

    def test_fit_record_envelope(self):
        envelope = json.dumps({"format": "pdf-forge/model", "model": self.model.model_dump(mode="json")})
        assert load_model_record(envelope) == self.model

    @pytest.mark.parametrize("text", ["not json", "{}", '{"model": {"log_norm": 1.0}}'])
    def test_invalid_records(self, text):
        with pytest.raises(InvalidModelError):
            load_model_record(text)


class TestOriginalScale:
    def test_flat_model_on_window(self):
        estimate = to_original_scale(flat_model(DomainSpec(a=0.0, b=2.0, total_count=100)))
        assert_allclose(estimate.pdf(1.0), 0.5)
        assert estimate.pdf(3.0) == 0.0
        assert estimate.cdf(-1.0) == 0.0 and estimate.cdf(5.0) == 1.0
        assert_allclose(estimate.cdf(1.0), 0.5, atol=1e-12)
        assert_allclose(estimate.quantile(0.25), 0.5, atol=1e-9)
        assert estimate.support == (0.0, 2.0)

    def test_censored_mass_scales_the_density(self):
        domain = DomainSpec(a=0.0, b=2.0, total_count=100, discarded_low=10, discarded_high=10, censored=True)
        estimate = to_original_scale(flat_model(domain))
        assert_allclose(estimate.pdf(1.0), 0.4)
        assert_allclose(estimate.cdf(np.array([0.0, 2.0])), [0.1, 0.9], atol=1e-12)

    def test_folded_model_is_mirrored(self):
        estimate = to_original_scale(
            flat_model(DomainSpec(a=0.0, b=2.0, total_count=100), SymmetryOption(enabled=True, center=0.0))
        )
        assert estimate.folded
        assert estimate.support == (-2.0, 2.0)
        assert_allclose(estimate.pdf(np.array([-1.0, 1.0])), [0.25, 0.25])
        assert_allclose(estimate.cdf(np.array([-2.0, 0.0, 2.0])), [0.0, 0.5, 1.0], atol=1e-12)
        assert_allclose(estimate.quantile(np.array([0.25, 0.75])), [-1.0, 1.0], atol=1e-9)

    def test_inverse_transform_draws(self):
        estimate = to_original_scale(flat_model(DomainSpec(a=0.0, b=2.0, total_count=100)))
        draws = estimate.sample(20000, np.random.default_rng(4))
        assert draws.min() >= 0.0 and draws.max() <= 2.0
        assert abs(draws.mean() - 1.0) < 0.02


class TestTiltedModel:
    """p_e(x) = exp(Lambda + x / 2) has Lambda = -ln(4 sinh(1/2))"""

    model = build_model(LagrangeVector(lambdas=(0.5,)), GRID, DomainSpec(a=-1.0, b=1.0, total_count=10))

    def test_normalization_constant(self):
        assert_allclose(self.model.log_norm, -math.log(4.0 * math.sinh(0.5)), rtol=1e-10)
        assert self.model.log_norm == pytest.approx(-0.7345, abs=1e-4)

    def test_density_at_the_center(self):
        assert_allclose(density(self.model, 0.0), 1.0 / (4.0 * math.sinh(0.5)), rtol=1e-10)
        assert density(self.model, 0.0) == pytest.approx(0.4798, abs=1e-4)


def test_chebyshev_matches_trigonometric_form():
    x = np.linspace(-1.0, 1.0, 257)
    t = chebyshev_vector(64, x)
    for j in range(1, 65):
        assert_allclose(t[:, j - 1], np.cos(j * np.arccos(x)), atol=1e-10)
