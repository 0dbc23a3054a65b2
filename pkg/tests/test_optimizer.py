import numpy as np
import pytest

from numpy.testing import assert_allclose
from pydantic import ValidationError

from pdf_forge.core.exceptions import DimensionCapReached, EnsembleIncompleteError
from pdf_forge.engine.optimizer import (
    LevelContext,
    classify,
    comparison_grid,
    dimension_stages,
    expand_dimension,
    fit,
    funnel_search,
    max_trial_steps,
    model_spread,
    pairwise_sse,
    partition_schedule,
    select_central,
)
from pdf_forge.models.fit import FitOptions, OptimizerConfig, ProgressEvent, SolutionStatus
from pdf_forge.models.sample import DomainSpec, RawSample, SymmetryOption
from pdf_forge.models.scoring import ScoreReport


def report_with(coverage: float) -> ScoreReport:
    return ScoreReport(raw_loglike=-0.4, penalty=0.0, effective=-0.4, coverage=coverage)


class TestPartitionSchedule:
    def test_small_sample_is_a_single_level(self):
        schedule = partition_schedule(1000)
        assert schedule.sizes == [1000]
        assert schedule.levels[0].indices.tolist() == list(range(1000))

    def test_boundary_size(self):
        assert partition_schedule(1025).sizes == [1025]
        assert partition_schedule(1026).sizes == [1025, 1026]

    def test_levels_are_nested(self):
        schedule = partition_schedule(5000)
        assert schedule.sizes == [1025, 2049, 4097, 5000]
        levels = schedule.levels
        for coarse, fine in zip(levels[:-2], levels[1:-1]):
            assert coarse.indices.tolist() == fine.indices[::2].tolist()
        for level in levels:
            assert level.indices[0] == 0 and level.indices[-1] == 4999
            assert np.all(np.diff(level.indices) > 0)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            partition_schedule(0)


class TestDimensionSchedule:
    def test_stages(self):
        assert dimension_stages(OptimizerConfig(max_multipliers=9)) == [0, 1, 2, 3, 4, 5, 7, 9]
        assert dimension_stages(OptimizerConfig())[-1] == 299

    def test_cap(self):
        assert expand_dimension(7, 9) == 9
        with pytest.raises(DimensionCapReached):
            expand_dimension(9, 9)
        with pytest.raises(ValueError):
            expand_dimension(-1)

    def test_step_size_schedule(self):
        cfg = OptimizerConfig()
        assert cfg.sigma_stages == 14
        assert cfg.initial_sigma * cfg.decay_rate ** cfg.sigma_stages < cfg.min_sigma
        assert max_trial_steps(OptimizerConfig(max_multipliers=9)) == 1 + 7 * 14 * 100

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            OptimizerConfig(solutions_wanted=5, max_attempts=3)
        with pytest.raises(ValidationError):
            OptimizerConfig(target_coverage=0.05, floor_coverage=0.4)


def test_classify():
    cfg = OptimizerConfig()
    assert classify(report_with(0.40), cfg) is SolutionStatus.SUCCESS
    assert classify(report_with(0.10), cfg) is SolutionStatus.FLOOR_SUCCESS
    assert classify(report_with(0.01), cfg) is SolutionStatus.FAILURE
    assert not SolutionStatus.FAILURE.accepted and SolutionStatus.FLOOR_SUCCESS.accepted


class TestEnsembleSelection:
    def test_central_minimizes_total_error(self):
        densities = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        assert select_central(densities) == 1

    def test_ties_go_to_the_lowest_index(self):
        densities = np.array([[1.0, 2.0], [1.0, 2.0]])
        assert select_central(densities) == 0

    def test_needs_a_model(self):
        with pytest.raises(ValueError):
            select_central(np.empty((0, 3)))

    def test_pairwise_sse_is_symmetric(self):
        densities = np.random.default_rng(0).random((4, 10))
        sse = pairwise_sse(densities, 0.1)
        assert_allclose(sse, sse.T)
        assert_allclose(np.diag(sse), 0.0)

    def test_spread(self):
        spread, available = model_spread(np.array([[0.0, 1.0], [2.0, 1.0]]), 0)
        assert available
        assert_allclose(spread, [2.0, 0.0])
        spread, available = model_spread(np.array([[0.0, 1.0]]), 0)
        assert not available and spread.size == 0


def test_comparison_grid_unfolds_symmetric_windows():
    domain = DomainSpec(a=0.0, b=3.0, total_count=10)
    grid = comparison_grid(domain, SymmetryOption(enabled=True, center=0.0))
    assert grid.size == 1001
    assert grid[0] == -3.0 and grid[-1] == 3.0
    assert comparison_grid(domain, SymmetryOption())[0] == 0.0


def test_funnel_search_stops_at_dimension_cap(normal_sample, small_calibration):
    x = np.sort(np.clip(normal_sample.values / 5.0, -0.99, 0.99))
    context = LevelContext(x, x.size)
    history, scores = [0], []
    cfg = OptimizerConfig(max_multipliers=2, max_failures=20)
    result = funnel_search(context, np.zeros(0), cfg, small_calibration, np.random.default_rng(1), history, scores)
    assert history[-1] <= 2
    assert result.lambdas.size == history[-1]
    assert result.steps <= max_trial_steps(cfg)
    assert np.all(np.diff(scores) > 0)


class TestFit:
    cfg = OptimizerConfig(solutions_wanted=2, max_attempts=4, seed=3)

    def test_uniform_sample(self, uniform_sample, small_calibration):
        ensemble = fit(uniform_sample, small_calibration, cfg=self.cfg)
        assert len(ensemble.attempts) == 2
        for attempt in ensemble.attempts:
            assert attempt.status.accepted
            assert attempt.report.coverage >= 0.05
            assert attempt.dimension_history[0] == 0
        assert ensemble.level_sizes == [512]
        assert ensemble.densities.shape == (2, 1001)

    def test_fixed_seed_reproduces_the_ensemble(self, uniform_sample, small_calibration):
        first = fit(uniform_sample, small_calibration, cfg=self.cfg)
        second = fit(uniform_sample, small_calibration, cfg=self.cfg)
        assert [a.model.lagrange for a in first.attempts] == [a.model.lagrange for a in second.attempts]
        assert first.central_index == second.central_index

    def test_normal_sample_reports_progress(self, normal_sample, small_calibration):
        events = []
        cfg = OptimizerConfig(solutions_wanted=1, max_attempts=3, seed=5)
        ensemble = fit(normal_sample, small_calibration, cfg=cfg, progress=events.append)
        central = ensemble.central
        assert central.model.dimension >= 1
        assert central.trial_steps <= max_trial_steps(cfg)
        assert np.all(np.diff(central.accepted_scores) > 0)
        assert events and all(isinstance(e, ProgressEvent) for e in events)

    def test_symmetric_fit(self, small_calibration):
        values = np.random.default_rng(14).laplace(size=800)
        cfg = OptimizerConfig(solutions_wanted=1, max_attempts=3, seed=2)
        options = FitOptions(symmetry=SymmetryOption(enabled=True, center=0.0))
        ensemble = fit(RawSample(values=values), small_calibration, options, cfg)
        assert ensemble.central.model.symmetry.enabled
        assert ensemble.domain.a == 0.0
        assert ensemble.comparison_grid[0] == -ensemble.domain.b

    def test_incomplete_ensemble(self, normal_sample, small_calibration):
        cfg = OptimizerConfig(
            target_coverage=0.99, floor_coverage=0.98, max_multipliers=0, solutions_wanted=1, max_attempts=1
        )
        with pytest.raises(EnsembleIncompleteError) as info:
            fit(normal_sample, small_calibration, cfg=cfg)
        assert info.value.ensemble is None
        assert len(info.value.attempts) == 1
        assert info.value.exit_code == 5
