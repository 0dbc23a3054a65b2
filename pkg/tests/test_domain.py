import numpy as np
import pytest

from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from pdf_forge.core.exceptions import DegenerateDomainError, InsufficientDataError, InvalidSampleError
from pdf_forge.engine.domain import (
    extension_bounds,
    fold_symmetric,
    from_unit,
    outlier_bounds,
    quantile_empirical,
    resolve_window,
    retained_values,
    sort_sample,
    to_unit,
)
from pdf_forge.models.sample import DomainSpec, RawSample, SortedSample, SymmetryOption


def sorted_of(values) -> SortedSample:
    return sort_sample(RawSample(values=values))


class TestSortSample:
    def test_sorts_without_touching_input(self):
        raw = RawSample(values=[3.0, 1.0, 2.0])
        assert sort_sample(raw).values.tolist() == [1.0, 2.0, 3.0]
        assert raw.values.tolist() == [3.0, 1.0, 2.0]

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_rejects_non_finite_with_index(self, bad):
        with pytest.raises(InvalidSampleError) as info:
            sort_sample(RawSample(values=[0.0, 1.0, bad, 2.0]))
        assert info.value.index == 2

    def test_rejects_empty(self):
        with pytest.raises(InvalidSampleError):
            sort_sample(RawSample(values=[]))


def test_quantile_empirical_interpolates_linearly():
    s = sorted_of([1.0, 2.0, 3.0, 4.0, 5.0])
    assert quantile_empirical(s, 0.25) == 2.0
    assert quantile_empirical(s, 0.125) == 1.5
    with pytest.raises(ValueError):
        quantile_empirical(s, 1.5)


class TestExtensionBounds:
    def test_uses_fifth_value_from_each_end(self):
        assert extension_bounds(sorted_of(np.arange(0.0, 10.0))) == (-4.0, 13.0)
        assert extension_bounds(sorted_of([0.0, 0.0, 0.0, 0.0, 0.0, 10.0])) == (0.0, 20.0)

    def test_small_samples_use_full_range(self):
        a, b = extension_bounds(sorted_of([0.0, 1.0, 2.0]))
        assert (a, b) == (-2.0, 4.0)

    def test_constant_sample_is_degenerate(self):
        with pytest.raises(DegenerateDomainError):
            extension_bounds(sorted_of([2.0] * 8))


def test_outlier_bounds_quartile_fences():
    s = sorted_of(np.arange(0.0, 9.0))  # Q25 = 2, Q75 = 6
    assert outlier_bounds(s, c=7.0) == (2.0 - 28.0, 6.0 + 28.0)


class TestResolveWindow:
    def test_extension_when_nothing_is_outside_the_fences(self):
        s = sorted_of(np.linspace(0.0, 1.0, 101))
        spec = resolve_window(s)
        assert not spec.censored
        assert spec.discarded_low == spec.discarded_high == 0
        assert spec.a < 0.0 and spec.b > 1.0
        assert spec.retained_ratio == 1.0

    def test_censors_far_outliers(self):
        rng = np.random.default_rng(3)
        values = np.concatenate((rng.standard_normal(1000), [1e6]))
        spec = resolve_window(sorted_of(values))
        assert spec.censored
        assert spec.discarded_high == 1
        assert spec.retained_count == 1000
        assert_allclose(spec.retained_ratio, 1000 / 1001)
        assert spec.b < 1e6

    def test_user_bounds_are_verbatim_and_closed(self):
        s = sorted_of([0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0])
        spec = resolve_window(s, user_bounds=(1.0, 8.0))
        assert (spec.a, spec.b) == (1.0, 8.0)
        assert spec.discarded_low == 1
        assert spec.discarded_high == 1
        assert retained_values(s, spec).tolist() == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]

    def test_inverted_user_bounds(self):
        with pytest.raises(DegenerateDomainError):
            resolve_window(sorted_of(np.arange(10.0)), user_bounds=(5.0, 1.0))

    def test_too_few_points(self):
        with pytest.raises(InsufficientDataError):
            resolve_window(sorted_of([0.0, 1.0, 2.0, 3.0, 4.0]))

    def test_window_keeping_too_few_points(self):
        with pytest.raises(InsufficientDataError):
            resolve_window(sorted_of(np.arange(20.0)), user_bounds=(0.0, 3.0))

    def test_constant_sample_is_degenerate(self):
        with pytest.raises(DegenerateDomainError):
            resolve_window(sorted_of([1.0] * 10))

    def test_tied_extremes_still_get_a_strict_margin(self):
        values = [0.0] * 6 + [0.5, 0.7, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]
        spec = resolve_window(sorted_of(values))
        assert spec.a < 0.0 and spec.b > 1.0

    def test_symmetry_clamps_lower_bound_to_center(self):
        rng = np.random.default_rng(5)
        symmetry = SymmetryOption(enabled=True, center=0.0)
        folded = fold_symmetric(sorted_of(rng.laplace(size=500)), symmetry)
        spec = resolve_window(folded, symmetry=symmetry)
        assert spec.a == 0.0
        assert folded.values.min() >= 0.0


@given(
    seed=st.integers(0, 2 ** 32 - 1),
    scale=st.floats(0.1, 10.0),
    shift=st.floats(-100.0, 100.0),
)
def test_window_is_translation_and_scale_equivariant(seed, scale, shift):
    values = np.random.default_rng(seed).standard_normal(200)
    base = resolve_window(sorted_of(values))
    moved = resolve_window(sorted_of(scale * values + shift))
    assert_allclose([moved.a, moved.b], [scale * base.a + shift, scale * base.b + shift], rtol=1e-9, atol=1e-9)
    assert (moved.discarded_low, moved.discarded_high) == (base.discarded_low, base.discarded_high)


class TestUnitMapping:
    spec = DomainSpec(a=2.0, b=6.0, total_count=10)

    def test_endpoints_map_to_unit_interval(self):
        assert to_unit(self.spec, 2.0) == -1.0
        assert to_unit(self.spec, 6.0) == 1.0
        assert to_unit(self.spec, 4.0) == 0.0

    def test_round_trip(self):
        v = np.linspace(2.0, 6.0, 17)
        assert_allclose(from_unit(self.spec, to_unit(self.spec, v)), v, rtol=0, atol=1e-14)

    def test_outside_window_is_rejected(self):
        with pytest.raises(ValueError):
            to_unit(self.spec, np.array([1.0, 3.0]))


def test_fold_symmetric_reflects_and_sorts():
    folded = fold_symmetric(sorted_of([-3.0, -1.0, 0.5, 2.0]), SymmetryOption(enabled=True, center=0.0))
    assert folded.values.tolist() == [0.5, 1.0, 2.0, 3.0]
