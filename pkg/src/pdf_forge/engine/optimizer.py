"""
Funnel diffusion: a Gaussian random walk over the Lagrange multipliers whose
step size shrinks geometrically after a fixed number of trials, wrapped in a
dimension schedule (0, 1, 2, 3, 4, 5, 7, 9, ...) and run over nested data
partitions. `fit` repeats the search with independent random streams and
selects the central member of the resulting ensemble.
"""
import time
import numpy as np

from typing import Callable, List, Optional, Tuple

from pdf_forge.core.exceptions import (
    DimensionCapReached,
    EnsembleIncompleteError,
    InvalidModelError,
    QuadratureError,
)
from pdf_forge.core.logging import get_logger
from pdf_forge.engine.domain import fold_symmetric, resolve_window, retained_values, sort_sample, to_unit
from pdf_forge.engine.maxent import ChebyshevBasis, OriginalScaleDensity, log_norm_from_values
from pdf_forge.engine.quadrature import build_grid, cdf_from_values
from pdf_forge.engine.scoring import score
from pdf_forge.models.density import GridConfig, LagrangeVector, MaxEntModel, QuadratureGrid
from pdf_forge.models.fit import (
    FitEnsemble,
    FitOptions,
    OptimizerConfig,
    PartitionLevel,
    PartitionSchedule,
    ProgressEvent,
    SolutionAttempt,
    SolutionStatus,
)
from pdf_forge.models.sample import DomainSpec, RawSample, SymmetryOption
from pdf_forge.models.scoring import ScoreReport, ScoringCalibration

logger = get_logger(__name__)

ProgressCallback = Callable[[ProgressEvent], None]

BASE_PARTITION_EXPONENT = 10
COMPARISON_POINTS = 1001
SMALL_DIMENSION_LIMIT = 5


def partition_schedule(n: int) -> PartitionSchedule:
    """
    Nested rank subsets of sizes 2^10+1, 2^11+1, ... below n, then all n points.

    Level indices are round(i (n-1) / (N_p - 1)); because every size is 2^k + 1,
    each level's ranks are the even-numbered ranks of the next one.
    """
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    sizes: List[int] = []
    k = BASE_PARTITION_EXPONENT
    if n > 2 ** k + 1:
        while 2 ** k + 1 < n:
            sizes.append(2 ** k + 1)
            k += 1
    sizes.append(n)

    levels = []
    for size in sizes:
        if size == n:
            indices = np.arange(n)
        else:
            indices = np.rint(np.arange(size) * (n - 1) / (size - 1)).astype(np.int64)
        indices.flags.writeable = False
        levels.append(PartitionLevel(size=size, indices=indices))
    return PartitionSchedule(total=n, levels=levels)


def expand_dimension(dimension: int, max_multipliers: int = 300) -> int:
    """Next dimension stage: +1 below 5, +2 from 5 on"""
    if dimension < 0:
        raise ValueError(f"dimension must be nonnegative, got {dimension}")
    step = 1 if dimension < SMALL_DIMENSION_LIMIT else 2
    expanded = dimension + step
    if expanded > max_multipliers:
        raise DimensionCapReached(f"dimension {expanded} exceeds the cap of {max_multipliers} multipliers")
    return expanded


def dimension_stages(cfg: OptimizerConfig) -> List[int]:
    """Every dimension the schedule can visit, starting at 0"""
    stages = [0]
    while True:
        try:
            stages.append(expand_dimension(stages[-1], cfg.max_multipliers))
        except DimensionCapReached:
            return stages


def max_trial_steps(cfg: OptimizerConfig) -> int:
    """Upper bound on trials in one partition level: a single D = 0 evaluation plus F_m per step size per stage"""
    return 1 + (len(dimension_stages(cfg)) - 1) * cfg.sigma_stages * cfg.max_failures


class LevelContext:
    """The scaled data of one partition level with its grid and tabulated basis"""

    def __init__(self, x: np.ndarray, full_n: int, grid_cfg: Optional[GridConfig] = None):
        self.x = np.asarray(x, dtype=np.float64)
        self.full_n = full_n
        self.grid: QuadratureGrid = build_grid(self.x, grid_cfg)
        self.basis = ChebyshevBasis(self.grid.edges)

    @property
    def size(self) -> int:
        return int(self.x.size)

    @property
    def level_shift(self) -> float:
        """Offset that turns the partition score into a score at the partition's own size"""
        return 0.5 * float(np.log(self.full_n / self.size))

    def evaluate(self, lambdas: np.ndarray, calibration: ScoringCalibration) -> Optional[ScoreReport]:
        """Score a trial multiplier vector; None when the trial density cannot be integrated"""
        h = self.basis.log_density_unnorm(lambdas)
        try:
            log_norm = log_norm_from_values(self.grid, h)
            us = cdf_from_values(self.grid.edges, np.exp(h + log_norm))
        except (InvalidModelError, QuadratureError) as e:
            logger.debug(f"Trial rejected: {e}")
            return None
        u = np.interp(self.x, self.grid.edges, us)
        return score(u, self.full_n, calibration)

    def log_norm(self, lambdas: np.ndarray) -> float:
        return log_norm_from_values(self.grid, self.basis.log_density_unnorm(lambdas))


class LevelResult:
    def __init__(self, lambdas: np.ndarray, report: ScoreReport, steps: int, reached_target: bool):
        self.lambdas = lambdas
        self.report = report
        self.steps = steps
        self.reached_target = reached_target


def _failed_report() -> ScoreReport:
    return ScoreReport(raw_loglike=float("-inf"), penalty=0.0, effective=float("-inf"), coverage=0.0)


def funnel_search(
    context: LevelContext,
    start: np.ndarray,
    cfg: OptimizerConfig,
    calibration: ScoringCalibration,
    rng: np.random.Generator,
    dimension_history: List[int],
    accepted_scores: List[float],
    final_level: bool = True,
    progress: Optional[ProgressCallback] = None,
    attempt: int = 0,
    level: int = 0,
) -> LevelResult:
    """
    Funnel diffusion on one partition level.

    Every trial perturbs all multipliers at once and is kept only when the
    effective score strictly improves. After F_m trials the step size decays;
    once it is spent the dimension grows and the step size resets. The search
    ends as soon as the target coverage is met, when the stall rule fires or
    when the dimension cap is reached. Levels before the last are judged at
    their own size since they only seed the next level.
    """
    shift = 0.0 if final_level else context.level_shift
    target_L = calibration.threshold(cfg.target_coverage)

    def reached(report: ScoreReport) -> bool:
        if final_level:
            return report.coverage >= cfg.target_coverage
        return report.effective + shift >= target_L

    lambdas = np.asarray(start, dtype=np.float64).copy()
    best = context.evaluate(lambdas, calibration) or _failed_report()
    accepted_scores.append(best.effective)
    steps = 1
    if reached(best):
        return LevelResult(lambdas, best, steps, True)

    dimension = lambdas.size
    if dimension == 0:
        try:
            dimension = expand_dimension(0, cfg.max_multipliers)
        except DimensionCapReached:
            return LevelResult(lambdas, best, steps, False)
        lambdas = np.zeros(dimension)
        dimension_history.append(dimension)

    stalled = 0
    stage_start = best.effective
    while True:
        sigma = cfg.initial_sigma
        for _ in range(cfg.sigma_stages):
            for _ in range(cfg.max_failures):
                trial = lambdas + rng.normal(0.0, sigma, size=dimension)
                report = context.evaluate(trial, calibration)
                steps += 1
                if report is None or not report.effective > best.effective:
                    continue
                lambdas, best = trial, report
                accepted_scores.append(best.effective)
                if reached(best):
                    return LevelResult(lambdas, best, steps, True)
            if progress is not None:
                progress(ProgressEvent(
                    attempt=attempt,
                    level=level,
                    level_size=context.size,
                    dimension=dimension,
                    sigma=sigma,
                    best_score=best.effective,
                    coverage=best.coverage,
                ))
            sigma *= cfg.decay_rate

        if np.isfinite(stage_start) and np.isfinite(best.effective):
            gain = (best.effective - stage_start) / max(abs(stage_start), np.finfo(float).tiny)
        else:
            gain = np.inf if np.isfinite(best.effective) else 0.0
        stalled = stalled + 1 if gain * 100.0 < cfg.stall_percent else 0
        if stalled >= cfg.stall_additions:
            logger.debug(f"Score stalled for {stalled} dimension additions at D={dimension}")
            break
        stage_start = best.effective

        try:
            expanded = expand_dimension(dimension, cfg.max_multipliers)
        except DimensionCapReached as e:
            logger.debug(str(e))
            break
        lambdas = np.concatenate((lambdas, np.zeros(expanded - dimension)))
        dimension = expanded
        dimension_history.append(dimension)

    return LevelResult(lambdas, best, steps, False)


def classify(report: ScoreReport, cfg: OptimizerConfig) -> SolutionStatus:
    if report.coverage >= cfg.target_coverage:
        return SolutionStatus.SUCCESS
    if report.coverage >= cfg.floor_coverage:
        return SolutionStatus.FLOOR_SUCCESS
    return SolutionStatus.FAILURE


def solve(
    contexts: List[LevelContext],
    domain: DomainSpec,
    symmetry: SymmetryOption,
    cfg: OptimizerConfig,
    calibration: ScoringCalibration,
    rng: np.random.Generator,
    attempt: int = 0,
    progress: Optional[ProgressCallback] = None,
) -> SolutionAttempt:
    """One ensemble member: funnel search over every partition level, each seeded by the previous one"""
    started = time.perf_counter()
    lambdas = np.zeros(0)
    history = [0]
    accepted: List[float] = []
    level_coverages: List[float] = []
    steps = 0
    bound = max_trial_steps(cfg)
    result = None
    for level, context in enumerate(contexts):
        result = funnel_search(
            context,
            lambdas,
            cfg,
            calibration,
            rng,
            dimension_history=history,
            accepted_scores=accepted,
            final_level=level == len(contexts) - 1,
            progress=progress,
            attempt=attempt,
            level=level,
        )
        assert result.steps <= bound, f"funnel search took {result.steps} trials, bound is {bound}"
        steps += result.steps
        lambdas = result.lambdas
        level_coverages.append(result.report.coverage)
        logger.debug(
            f"Attempt {attempt} level {level} (N_p={context.size}): D={lambdas.size}, "
            f"score {result.report.effective:.4f}, coverage {result.report.coverage:.3f}"
        )

    final = contexts[-1]
    report = result.report
    status = classify(report, cfg)
    lagrange = LagrangeVector.from_array(lambdas)
    model = MaxEntModel(
        lagrange=lagrange,
        log_norm=final.log_norm(lambdas),
        domain=domain,
        symmetry=symmetry,
    )
    if status is SolutionStatus.FLOOR_SUCCESS:
        logger.warning(
            f"Attempt {attempt} met only the floor coverage ({report.coverage:.3f} < {cfg.target_coverage})"
        )
    return SolutionAttempt(
        attempt=attempt,
        model=model,
        report=report,
        status=status,
        dimension_history=history,
        accepted_scores=accepted,
        level_coverages=level_coverages,
        trial_steps=steps,
        wall_time=time.perf_counter() - started,
    )


def pairwise_sse(densities: np.ndarray, spacing: float) -> np.ndarray:
    """Matrix of sum_grid (p_i - p_j)^2 dx over all model pairs"""
    diffs = densities[:, None, :] - densities[None, :, :]
    return np.sum(diffs ** 2, axis=2) * spacing


def select_central(densities: np.ndarray, spacing: float = 1.0) -> int:
    """Index minimizing total pairwise squared error; the lowest index wins ties"""
    densities = np.atleast_2d(np.asarray(densities, dtype=np.float64))
    if densities.shape[0] == 0:
        raise ValueError("at least one model is required")
    return int(np.argmin(pairwise_sse(densities, spacing).sum(axis=1)))


def model_spread(densities: np.ndarray, central_index: int) -> Tuple[np.ndarray, bool]:
    """
    Pointwise RMS deviation of the other models around the central one.

    Returns (spread, available); a single-model ensemble has no spread.
    """
    densities = np.atleast_2d(np.asarray(densities, dtype=np.float64))
    if densities.shape[0] < 2:
        return np.empty(0), False
    others = np.delete(densities, central_index, axis=0)
    spread = np.sqrt(np.mean((others - densities[central_index]) ** 2, axis=0))
    return spread, True


def comparison_grid(domain: DomainSpec, symmetry: SymmetryOption, points: int = COMPARISON_POINTS) -> np.ndarray:
    """Uniform points over the window in original units, unfolded when symmetric"""
    low = 2.0 * symmetry.center - domain.b if symmetry.enabled else domain.a
    return np.linspace(low, domain.b, points)


def prepare_levels(
    sample: RawSample, options: FitOptions
) -> Tuple[DomainSpec, List[LevelContext], PartitionSchedule]:
    """Sort, fold, window and scale the sample, then build every partition level"""
    sorted_sample = sort_sample(sample)
    symmetry = options.symmetry
    working = fold_symmetric(sorted_sample, symmetry) if symmetry.enabled else sorted_sample
    domain = resolve_window(working, options.censor_c, options.bounds, symmetry)
    x = np.asarray(to_unit(domain, retained_values(working, domain)))
    schedule = partition_schedule(x.size)
    contexts = [LevelContext(x[level.indices], x.size, options.grid) for level in schedule.levels]
    return domain, contexts, schedule


def fit(
    sample: RawSample,
    calibration: ScoringCalibration,
    options: Optional[FitOptions] = None,
    cfg: Optional[OptimizerConfig] = None,
    progress: Optional[ProgressCallback] = None,
) -> FitEnsemble:
    """
    Produce an ensemble of solutions for one sample.

    Attempts run until `solutions_wanted` of them are accepted (success or
    floor-success) or `max_attempts` are spent. Attempt i draws from the i-th
    child of SeedSequence(cfg.seed), so a fixed seed reproduces the ensemble.
    """
    options = options or FitOptions()
    cfg = cfg or OptimizerConfig()
    domain, contexts, schedule = prepare_levels(sample, options)
    logger.info(
        f"Fitting {domain.retained_count} of {domain.total_count} points on [{domain.a:.6g}, {domain.b:.6g}] "
        f"with partitions {schedule.sizes}"
    )

    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.max_attempts)
    accepted: List[SolutionAttempt] = []
    rejected: List[SolutionAttempt] = []
    for attempt, stream in enumerate(streams):
        if len(accepted) >= cfg.solutions_wanted:
            break
        solution = solve(
            contexts, domain, options.symmetry, cfg, calibration, np.random.default_rng(stream), attempt, progress
        )
        logger.info(
            f"Attempt {attempt}: {solution.status.value} with D={solution.model.dimension}, "
            f"coverage {solution.report.coverage:.3f}, {solution.trial_steps} trials, {solution.wall_time:.2f}s"
        )
        (accepted if solution.status.accepted else rejected).append(solution)

    ensemble = build_ensemble(accepted, rejected, domain, options.symmetry, schedule.sizes) if accepted else None
    if len(accepted) < cfg.solutions_wanted:
        raise EnsembleIncompleteError(
            f"only {len(accepted)} of {cfg.solutions_wanted} solutions accepted in {cfg.max_attempts} attempts",
            attempts=accepted + rejected,
            ensemble=ensemble,
        )
    return ensemble


def build_ensemble(
    accepted: List[SolutionAttempt],
    rejected: List[SolutionAttempt],
    domain: DomainSpec,
    symmetry: SymmetryOption,
    level_sizes: Optional[List[int]] = None,
) -> FitEnsemble:
    grid = comparison_grid(domain, symmetry)
    densities = np.vstack([OriginalScaleDensity(a.model).pdf(grid) for a in accepted])
    spacing = float(grid[1] - grid[0])
    sse = pairwise_sse(densities, spacing)
    central = select_central(densities, spacing)
    return FitEnsemble(
        attempts=accepted,
        central_index=central,
        domain=domain,
        level_sizes=level_sizes or [],
        pairwise_sse=sse,
        rejected=rejected,
        comparison_grid=grid,
        densities=densities,
    )
