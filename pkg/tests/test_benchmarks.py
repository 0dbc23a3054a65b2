"""Long benchmark scenarios against the built-in distributions; run with `pytest -m slow`."""
import numpy as np
import pandas as pd
import pytest

from pdf_forge.components.registry import BENCHMARK_DISTRIBUTIONS, make_distribution, sample_distribution
from pdf_forge.engine.diagnostics import figure_of_merit
from pdf_forge.engine.maxent import OriginalScaleDensity
from pdf_forge.engine.scoring import calibrate
from pdf_forge.models.fit import SolutionStatus
from pdf_forge.models.report import RunConfig
from pdf_forge.services.benchmark_service import benchmark_service
from pdf_forge.services.fit_service import fit_service

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def desk_calibration():
    return calibrate([2 ** 8, 2 ** 10, 2 ** 12], 10000, seed=20190101, verify=False)


def fit_known(name: str, n: int, seed: int, calibration, solutions: int = 5, symmetric: bool = False):
    dist = make_distribution(name)
    sample = sample_distribution(dist, n, np.random.default_rng(seed))
    config = RunConfig(
        seed=seed,
        solutions=solutions,
        symmetry_center=dist.symmetry_center if symmetric else None,
    )
    outcome = fit_service.fit_sample(sample, config, calibration, true_pdf=dist.pdf, true_cdf=dist.cdf)
    return sample, outcome


def local_maxima(estimate: OriginalScaleDensity, lo: float, hi: float, points: int = 4001) -> np.ndarray:
    v = np.linspace(lo, hi, points)
    p = estimate.pdf(v)
    peaks = (p[1:-1] > p[:-2]) & (p[1:-1] >= p[2:])
    return v[1:-1][peaks]


def test_uniform_needs_few_multipliers(desk_calibration):
    rows = benchmark_service.run_benchmark(
        dists=["uniform"], sizes=[4096], samples_per_size=4, seed=101, calibration=desk_calibration
    )
    assert all(row.status in ("success", "floor-success") for row in rows)
    assert sum(row.multipliers_reported <= 3 for row in rows) >= 3
    assert all(row.kl < 1e-3 for row in rows)
    assert sum(row.milliseconds for row in rows) < 30_000


def test_gaussian_settles_on_three_multipliers(desk_calibration):
    # three reported multipliers: the normalization plus lambda_1 and lambda_2
    settled = 0
    for seed in range(1, 6):
        _, outcome = fit_known("normal", 4096, seed, desk_calibration, solutions=1)
        central = outcome.ensemble.central
        settled += central.status is SolutionStatus.SUCCESS and central.model.multipliers_reported == 3
    assert settled >= 3


def test_laplace_with_symmetry(desk_calibration):
    for seed in (11, 12, 13, 14):
        sample, outcome = fit_known("laplace", 4096, seed, desk_calibration, symmetric=True)
        assert outcome.complete
        assert outcome.ensemble.central.model.symmetry.enabled
        assert outcome.diagnostics.kl < 2e-2
        assert fit_service.sqr_series(outcome.ensemble.central.model, sample).max_abs < 2.5


def test_discontinuous_large_sample(desk_calibration):
    _, outcome = fit_known("discontinuous", 2 ** 16, 21, desk_calibration, solutions=1)
    assert outcome.complete
    assert outcome.diagnostics.kl < 1e-2


def test_fingers_are_resolved_with_enough_data(desk_calibration):
    _, outcome = fit_known("fingers-large", 2 ** 16, 31, desk_calibration, solutions=1)
    peaks = local_maxima(OriginalScaleDensity(outcome.ensemble.central.model), 0.0, 1.0)
    assert peaks.size == 5
    np.testing.assert_allclose(peaks, (2.0 * np.arange(1, 6) - 1.0) / 10.0, atol=0.02)


def test_fingers_are_smoothed_over_with_little_data(desk_calibration):
    _, outcome = fit_known("fingers-large", 2 ** 8, 32, desk_calibration, solutions=1)
    peaks = local_maxima(OriginalScaleDensity(outcome.ensemble.central.model), 0.0, 1.0)
    assert peaks.size <= 2


def test_draws_from_the_fitted_model_score_positive(desk_calibration):
    sample, outcome = fit_known("two-gaussians", 1024, 41, desk_calibration, solutions=1)
    estimate = OriginalScaleDensity(outcome.ensemble.central.model)
    positive = 0
    for trial in range(100):
        rng = np.random.default_rng(5000 + trial)
        fom, _ = figure_of_merit(estimate.sample(sample.count, rng), estimate.quantile, rng)
        assert fom <= 1.0
        positive += fom > 0.0
    assert positive >= 90


def test_ensemble_selection_is_deterministic(desk_calibration):
    runs = [fit_known("gamma", 4096, 51, desk_calibration, solutions=5)[1] for _ in range(2)]
    first, second = (run.ensemble for run in runs)
    assert first.central_index == second.central_index
    np.testing.assert_array_equal(first.pairwise_sse, second.pairwise_sse)
    assert all(run.complete for run in runs)
    for attempt in first.attempts:
        assert attempt.status.accepted
        assert attempt.report.coverage >= 0.05
    assert first.central.report.coverage >= 0.05


def test_fit_time_grows_with_sample_size(desk_calibration):
    rows = benchmark_service.run_benchmark(
        dists=BENCHMARK_DISTRIBUTIONS,
        sizes=[2 ** 8, 2 ** 10, 2 ** 12],
        samples_per_size=2,
        seed=61,
        calibration=desk_calibration,
    )
    timing = benchmark_service.timing_summary(rows)
    for name, group in timing.groupby("distribution", sort=False):
        by_size = group.set_index("N")["mean_ms"]
        assert by_size[2 ** 12] < 60_000, name
        assert pd.Series(by_size.loc[[2 ** 8, 2 ** 10, 2 ** 12]].to_numpy()).is_monotonic_increasing, name
