"""
Order-statistics scoring of a trial cdf.

A sample mapped through the true cdf is SURD (sampled uniform random data).
Each sorted value U(s) is scored under the exact density of the s-th order
statistic of N uniforms; the mean log density is corrected by -(1/2) ln N so
that its distribution no longer depends on the sample size, and a calibration
table of that distribution turns a score into a coverage fraction.
"""
import numpy as np

from functools import lru_cache
from scipy import special, stats
from typing import Dict, Iterable, List, Optional, Tuple, Union

from pdf_forge.core.exceptions import CalibrationError
from pdf_forge.core.logging import get_logger
from pdf_forge.models.scoring import (
    CALIBRATION_VERSION,
    QUANTILE_LEVELS,
    ScoreReport,
    ScoringCalibration,
    SqrSeries,
    UnitSortedSample,
)

logger = get_logger(__name__)

UnitValues = Union[UnitSortedSample, np.ndarray]

PENALTY_FRACTION = 0.005
PENALTY_WEIGHT = 0.1
SLOPE_EXPECTED, SLOPE_TOLERANCE = 0.5, 0.02
INTERCEPT_EXPECTED, INTERCEPT_TOLERANCE = -0.4, 0.05
MIN_CALIBRATION_TRIALS = 1000
# Upper bound on uniforms drawn at once during calibration
CHUNK_ELEMENTS = 2_000_000


def _values(u: UnitValues) -> np.ndarray:
    return u.u if isinstance(u, UnitSortedSample) else np.asarray(u, dtype=np.float64)


def order_stat_moments(s: int, n: int) -> Tuple[float, float]:
    """Mean s/(N+1) and standard deviation sqrt(mu(1-mu)/(N+2)) of the s-th of N uniforms"""
    if not 1 <= s <= n:
        raise ValueError(f"rank must satisfy 1 <= s <= N, got s={s}, N={n}")
    mu = s / (n + 1)
    return mu, float(np.sqrt(mu * (1.0 - mu)) / np.sqrt(n + 2))


@lru_cache(maxsize=64)
def _rank_terms(n: int) -> Tuple[np.ndarray, np.ndarray]:
    s = np.arange(1, n + 1, dtype=np.float64)
    log_coef = special.gammaln(n + 1.0) - special.gammaln(n - s + 1.0) - special.gammaln(s)
    s.flags.writeable = False
    log_coef.flags.writeable = False
    return s, log_coef


def log_order_stat_density(s, n: int, u) -> Union[float, np.ndarray]:
    """
    ln p_s(u | N) = ln Gamma(N+1) - ln Gamma(N-s+1) - ln Gamma(s) + (N-s) ln(1-u) + (s-1) ln u.

    A zero exponent contributes 0 even at u = 0 or 1; otherwise those
    endpoints give -inf.
    """
    s_arr = np.asarray(s, dtype=np.float64)
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any(s_arr < 1) or np.any(s_arr > n):
        raise ValueError(f"ranks must lie in [1, {n}]")
    log_coef = special.gammaln(n + 1.0) - special.gammaln(n - s_arr + 1.0) - special.gammaln(s_arr)
    result = log_coef + special.xlogy(s_arr - 1.0, u_arr) + special.xlog1py(n - s_arr, -u_arr)
    return float(result) if result.ndim == 0 else result


def log_likelihood(u: UnitValues, full_n: Optional[int] = None) -> float:
    """
    L = (1/N_p) sum_s ln p_s(U(s) | N_p) - (1/2) ln N, with N the full sample size.

    Any -inf term makes L = -inf.
    """
    values = _values(u)
    n_p = values.size
    if full_n is None:
        full_n = u.total if isinstance(u, UnitSortedSample) else n_p
    if full_n < n_p:
        raise ValueError(f"full sample size {full_n} is smaller than the partition size {n_p}")
    s, log_coef = _rank_terms(n_p)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = log_coef + special.xlogy(s - 1.0, values) + special.xlog1py(n_p - s, -values)
    total = float(np.mean(terms))
    if np.isnan(total):
        return float("-inf")
    return total - 0.5 * float(np.log(full_n))


def penalty_terms(n: int) -> int:
    """p = max(1, floor(0.005 N)) order statistics checked at each boundary"""
    return max(1, int(np.floor(PENALTY_FRACTION * n)))


def boundary_penalty(u: UnitValues) -> float:
    """
    ln[1 + (0.1/p) sum_{i<=p} |U(i) - i/(N+1)| + (0.1/p) sum_{j>N-p} |U(j) - j/(N+1)|]

    Penalizes tails that the bulk log-likelihood barely sees.
    """
    values = _values(u)
    n = values.size
    p = min(penalty_terms(n), n)
    ranks = np.arange(1, n + 1, dtype=np.float64)
    means = ranks / (n + 1)
    low = np.abs(values[:p] - means[:p]).sum()
    high = np.abs(values[n - p:] - means[n - p:]).sum()
    return float(np.log1p(PENALTY_WEIGHT / p * (low + high)))


def score(u: UnitValues, full_n: Optional[int], calibration: ScoringCalibration) -> ScoreReport:
    """Effective score L - penalty and its coverage under the calibration"""
    raw = log_likelihood(u, full_n)
    penalty = boundary_penalty(u)
    effective = raw - penalty
    return ScoreReport(
        raw_loglike=raw,
        penalty=penalty,
        effective=effective,
        coverage=calibration.coverage(effective),
        raw_coverage=calibration.coverage(raw),
    )


def surd_loglike_trials(n: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """L for `trials` independent sorted uniform samples of size n, no penalty"""
    s, log_coef = _rank_terms(n)
    chunk = max(1, CHUNK_ELEMENTS // n)
    scores: List[np.ndarray] = []
    done = 0
    while done < trials:
        rows = min(chunk, trials - done)
        u = np.sort(rng.random((rows, n)), axis=1)
        with np.errstate(divide="ignore"):
            terms = log_coef + special.xlogy(s - 1.0, u) + special.xlog1py(n - s, -u)
        scores.append(terms.mean(axis=1) - 0.5 * np.log(n))
        done += rows
    return np.concatenate(scores)


def expected_loglike(n: int) -> float:
    """
    Exact SURD expectation of L at size n.

    E[ln p_s(U(s))] is minus the entropy of Beta(s, N-s+1), so no sampling is needed.
    """
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    s = np.arange(1, n + 1, dtype=np.float64)
    entropy = stats.beta.entropy(s, n - s + 1.0)
    return float(-np.mean(entropy) - 0.5 * np.log(n))


def size_law(size_means: Dict[int, float]) -> Tuple[float, float]:
    """Least-squares slope and intercept of E[(1/N) ln P] against ln N"""
    if len(size_means) < 2:
        raise CalibrationError("the size law needs at least two sample sizes")
    sizes = sorted(size_means)
    fit = stats.linregress(np.log(sizes), [size_means[n] for n in sizes])
    return float(fit.slope), float(fit.intercept)


def calibrate(
    sizes: Iterable[int],
    trials_per_size: int,
    rng: Optional[np.random.Generator] = None,
    seed: Optional[int] = None,
    verify: bool = True,
) -> ScoringCalibration:
    """
    Monte Carlo calibration of the universal scoring distribution.

    For every size the SURD log-likelihood is sampled `trials_per_size` times,
    the mean of (1/N) ln P is regressed on ln N (slope 1/2, intercept -0.4
    expected) and the pooled values are summarized by 1001 quantiles.
    """
    sizes = sorted({int(n) for n in sizes})
    if not sizes:
        raise CalibrationError("at least one sample size is required")
    if trials_per_size < MIN_CALIBRATION_TRIALS:
        raise CalibrationError(
            f"{trials_per_size} trials per size is too few; use at least {MIN_CALIBRATION_TRIALS}"
        )
    if rng is None:
        rng = np.random.default_rng(seed)

    pooled: List[np.ndarray] = []
    size_means: Dict[int, float] = {}
    for n in sizes:
        scores = surd_loglike_trials(n, trials_per_size, rng)
        pooled.append(scores)
        size_means[n] = float(scores.mean() + 0.5 * np.log(n))
        logger.info(f"Calibrated N={n}: mean L = {scores.mean():.4f} over {trials_per_size} trials")

    slope, intercept = (None, None)
    if len(sizes) >= 2:
        slope, intercept = size_law(size_means)
        logger.info(f"Size law: slope {slope:.4f}, intercept {intercept:.4f}")
        if verify and (
            abs(slope - SLOPE_EXPECTED) > SLOPE_TOLERANCE
            or abs(intercept - INTERCEPT_EXPECTED) > INTERCEPT_TOLERANCE
        ):
            raise CalibrationError(
                f"size law regression failed: slope {slope:.4f} (expected {SLOPE_EXPECTED} +/- {SLOPE_TOLERANCE}), "
                f"intercept {intercept:.4f} (expected {INTERCEPT_EXPECTED} +/- {INTERCEPT_TOLERANCE})",
                slope=slope,
                intercept=intercept,
            )

    values = np.concatenate(pooled)
    return ScoringCalibration(
        version=CALIBRATION_VERSION,
        seed=seed,
        sizes=sizes,
        trials_per_size={n: trials_per_size for n in sizes},
        size_means=size_means,
        slope=slope,
        intercept=intercept,
        pooled_mean=float(values.mean()),
        quantiles=np.quantile(values, QUANTILE_LEVELS).tolist(),
    )


def coverage_window(calibration: ScoringCalibration, low: float = 0.05, high: float = 0.95) -> Tuple[float, float]:
    """L bounds of the central [low, high] coverage band"""
    if not 0.0 <= low < high <= 1.0:
        raise ValueError(f"require 0 <= low < high <= 1, got ({low}, {high})")
    return calibration.threshold(low), calibration.threshold(high)


def sqr(u: UnitValues) -> SqrSeries:
    """Scaled residuals Delta_s = sqrt(N+2) (U(s) - s/(N+1)) against mu_s = s/(N+1)"""
    values = _values(u)
    n = values.size
    mu = np.arange(1, n + 1, dtype=np.float64) / (n + 1)
    return SqrSeries(mu=mu, delta=np.sqrt(n + 2.0) * (values - mu))
