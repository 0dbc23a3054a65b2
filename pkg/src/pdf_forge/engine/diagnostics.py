"""
Quality metrics for a fitted density: KS and KL against a known truth, the
figure of merit (is the input a typical draw from the model?) and the
coverage / multiplier columns of the benchmark tables.
"""
import numpy as np
import pandas as pd

from scipy import integrate, special
from typing import Callable, Optional, Sequence, Tuple, Union

from pdf_forge.core.logging import get_logger
from pdf_forge.engine.domain import to_unit
from pdf_forge.engine.maxent import OriginalScaleDensity
from pdf_forge.engine.quadrature import cdf_eval
from pdf_forge.models.density import MaxEntModel
from pdf_forge.models.fit import FitEnsemble
from pdf_forge.models.report import BenchmarkRow, DiagnosticsReport
from pdf_forge.models.sample import RawSample

logger = get_logger(__name__)

Curve = Callable[[np.ndarray], np.ndarray]

KS_POINTS = 10_000
KL_POINTS = 20_001
FOM_REFERENCE_SAMPLES = 10
FOM_TEST_SAMPLES = 100


def ks_metric(
    cdf_est: Curve, cdf_true: Curve, n: int, window: Tuple[float, float], points: int = KS_POINTS
) -> Tuple[float, float]:
    """
    Largest cdf gap on a dense grid over the window and its asymptotic
    Kolmogorov p-value at sqrt(n) * D.
    """
    grid = np.linspace(window[0], window[1], points)
    statistic = float(np.max(np.abs(np.asarray(cdf_est(grid)) - np.asarray(cdf_true(grid)))))
    p_value = float(special.kolmogorov(np.sqrt(n) * statistic))
    return statistic, min(max(p_value, 0.0), 1.0)


def kl_metric(
    pdf_true: Curve,
    pdf_est: Curve,
    window: Tuple[float, float],
    points: int = KL_POINTS,
    epsilon: float = 1e-12,
) -> float:
    """
    integral of p_true ln(p_true / p_est) by Simpson on a uniform grid over
    the window, clipped at 0.

    Both densities are conditioned on the part of the window where the truth
    is positive: a window that overhangs the truth's support (the extension
    past a uniform sample's extremes) or cuts off its tails (a censor window)
    is not charged for mass the truth does not put there.
    """
    grid = np.linspace(window[0], window[1], points)
    p = np.asarray(pdf_true(grid), dtype=np.float64)
    finite = np.isfinite(p)
    if not finite.all():
        # integrable singularities of the truth (gamma at 0) land on grid points
        logger.debug(f"Dropping {np.count_nonzero(~finite)} non-finite truth values from the KL integral")
        p = np.where(finite, p, 0.0)
    support = p > 0.0
    if not support.any():
        raise ValueError(f"the true density vanishes on the window [{window[0]}, {window[1]}]")
    q = np.where(support, np.maximum(np.asarray(pdf_est(grid), dtype=np.float64), epsilon), 0.0)

    p_mass = float(integrate.simpson(p, x=grid))
    q_mass = float(integrate.simpson(q, x=grid))
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = special.xlogy(p, p) - special.xlogy(p, q)
    integrand = np.where(support, integrand, 0.0)
    kl = float(integrate.simpson(integrand, x=grid)) / p_mass + np.log(q_mass / p_mass)
    return max(kl, 0.0)


def figure_of_merit(
    sample: np.ndarray,
    quantile: Curve,
    rng: np.random.Generator,
    references: int = FOM_REFERENCE_SAMPLES,
    tests: int = FOM_TEST_SAMPLES,
) -> Tuple[float, int]:
    """
    Figure of merit in (-inf, 1] and the number of ranks excluded for zero spread.

    Reference and test samples of the input's size are drawn through the model
    quantile. Per sorted rank, the spread of reference-minus-test differences
    over all reference/test pairs sets the scale; each reference sample and the
    input are then rated by how far they sit from the mean reference, and the
    input's average rating is compared with the distribution of the
    references' ratings.
    """
    observed = np.sort(np.asarray(sample, dtype=np.float64))
    n = observed.size
    if n == 0:
        raise ValueError("figure of merit needs a nonempty sample")

    reference = np.sort(np.asarray(quantile(rng.random((references, n)))), axis=1)
    ref_mean = reference.mean(axis=0)
    ref_var = reference.var(axis=0)

    # test samples are accumulated around the reference mean to keep memory at O(n)
    shifted_sum = np.zeros(n)
    shifted_sq = np.zeros(n)
    for _ in range(tests):
        shifted = np.sort(np.asarray(quantile(rng.random(n)))) - ref_mean
        shifted_sum += shifted
        shifted_sq += shifted ** 2
    test_shift = shifted_sum / tests
    test_var = np.maximum(shifted_sq / tests - test_shift ** 2, 0.0)

    # variance of (reference - test) over every reference/test pair
    sigma = np.sqrt(ref_var + test_var)
    valid = sigma > 0
    excluded = int(np.count_nonzero(~valid))
    if excluded:
        logger.warning(f"{excluded} of {n} ranks have zero spread and are left out of the figure of merit")
    if not valid.any():
        return 1.0, excluded

    # mu_ref - mu_test{r} reduces to mean(reference) - reference[r]; likewise for the input
    scale = 2.0 * sigma[valid]
    fom_reference = 1.0 - np.abs(reference[:, valid] - ref_mean[valid]) / scale
    fom_sample = 1.0 - np.abs(observed[valid] - ref_mean[valid]) / scale

    spread = float(fom_reference.std())
    gap = abs(float(fom_reference.mean()) - float(fom_sample.mean()))
    if spread == 0.0:
        return (1.0 if gap == 0.0 else float("-inf")), excluded
    return 1.0 - gap / (2.0 * spread), excluded


def retained_original(sample: RawSample, estimate: OriginalScaleDensity) -> np.ndarray:
    """Observations that fall inside the model's window, in original units"""
    values = np.sort(sample.values)
    folded = estimate.fold(values)
    inside = (folded >= estimate.domain.a) & (folded <= estimate.domain.b)
    return values[inside]


def probability_transform(model: MaxEntModel, sample: RawSample) -> np.ndarray:
    """Sorted model cdf values U(s) of the observations inside the window, the input of the SQR series"""
    estimate = OriginalScaleDensity(model)
    folded = np.sort(estimate.fold(np.asarray(sample.values, dtype=np.float64)))
    inside = folded[(folded >= model.domain.a) & (folded <= model.domain.b)]
    if inside.size == 0:
        raise ValueError("no observation falls inside the model window")
    u, _ = cdf_eval(estimate.table, to_unit(model.domain, inside))
    return np.maximum.accumulate(np.asarray(u, dtype=np.float64))


def diagnose(
    ensemble: FitEnsemble,
    sample: RawSample,
    rng: np.random.Generator,
    true_pdf: Optional[Curve] = None,
    true_cdf: Optional[Curve] = None,
) -> DiagnosticsReport:
    """Diagnostics of the central model; KS and KL only when the truth is known"""
    central = ensemble.central
    estimate = OriginalScaleDensity(central.model)
    window = estimate.support

    ks_stat = ks_p = kl = None
    if true_cdf is not None:
        ks_stat, ks_p = ks_metric(estimate.cdf, true_cdf, sample.count, window)
    if true_pdf is not None:
        kl = kl_metric(true_pdf, estimate.pdf, window, epsilon=central.model.epsilon)

    fom, excluded = figure_of_merit(retained_original(sample, estimate), estimate.quantile, rng)
    return DiagnosticsReport(
        ks_stat=ks_stat,
        ks_p=ks_p,
        kl=kl,
        fom=fom,
        fom_excluded_ranks=excluded,
        surd_coverage=central.report.coverage,
        raw_coverage=central.report.raw_coverage,
        multipliers_reported=central.model.multipliers_reported,
    )


def correlation_export(reports: Sequence[Union[DiagnosticsReport, BenchmarkRow]]) -> pd.DataFrame:
    """(ks_p, fom) pairs for a p-value versus figure-of-merit scatter; reports missing either are skipped"""
    pairs = [(r.ks_p, r.fom) for r in reports if r.ks_p is not None and r.fom is not None]
    if not pairs:
        raise ValueError("at least one report with both a KS p-value and a figure of merit is required")
    return pd.DataFrame(pairs, columns=["ks_p", "fom"])
