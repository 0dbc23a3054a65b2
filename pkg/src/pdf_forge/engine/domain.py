"""
Sample ingestion and the analysis window.

Decides the interval [a, b] a density is estimated on (data-driven extension
or quantile censor window), counts what falls outside it and maps values
between original units and the Chebyshev interval [-1, 1].
"""
import numpy as np

from typing import Optional, Tuple, Union

from pdf_forge.core.exceptions import (
    DegenerateDomainError,
    InsufficientDataError,
    InvalidSampleError,
    NonFiniteSampleError,
)
from pdf_forge.core.logging import get_logger
from pdf_forge.models.sample import DomainSpec, RawSample, SortedSample, SymmetryOption

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]

DEFAULT_CENSOR_C = 7.0
MIN_RETAINED = 6


def sort_sample(raw: RawSample) -> SortedSample:
    """Stable nondecreasing copy of the sample; the input is left untouched"""
    if raw.count < 1:
        raise InvalidSampleError("sample is empty")
    finite = np.isfinite(raw.values)
    if not finite.all():
        index = int(np.argmin(finite))
        raise NonFiniteSampleError(
            f"non-finite value {raw.values[index]!r} at index {index}", index=index
        )
    return SortedSample(values=np.sort(raw.values, kind="stable"))


def quantile_empirical(sorted_sample: SortedSample, q: float) -> float:
    """Linear interpolation of the order statistics at rank q(N-1)+1"""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"quantile level must be in [0, 1], got {q}")
    if sorted_sample.count < 1:
        raise InvalidSampleError("sample is empty")
    return float(np.quantile(sorted_sample.values, q, method="linear"))


def extension_bounds(sorted_sample: SortedSample) -> Tuple[float, float]:
    """
    Extend past each extreme by its gap to the fifth value from that end:
    a = V(1) - (V(5) - V(1)), b = V(N) + (V(N) - V(N-4)).

    Samples with fewer than 6 values use the full range as the spread.
    """
    v = sorted_sample.values
    n = v.size
    if n < 1:
        raise InvalidSampleError("sample is empty")
    if n >= 6:
        a = v[0] - (v[4] - v[0])
        b = v[-1] + (v[-1] - v[-5])
    else:
        spread = v[-1] - v[0]
        a = v[0] - spread
        b = v[-1] + spread
    if not a < b:
        raise DegenerateDomainError(
            f"all {n} observations equal {v[0]!r}; a density needs a nonzero spread"
        )
    return float(a), float(b)


def outlier_bounds(sorted_sample: SortedSample, c: float = DEFAULT_CENSOR_C) -> Tuple[float, float]:
    """Quartile fences a = Q25 - c IQR, b = Q75 + c IQR"""
    if sorted_sample.count < 4:
        raise InsufficientDataError(f"quartile fences need at least 4 observations, got {sorted_sample.count}")
    q25 = quantile_empirical(sorted_sample, 0.25)
    q75 = quantile_empirical(sorted_sample, 0.75)
    iqr = q75 - q25
    if iqr <= 0:
        raise DegenerateDomainError(f"interquartile range is zero (Q25 = Q75 = {q25!r})")
    return q25 - c * iqr, q75 + c * iqr


def _strict_extension(v: np.ndarray, a: float, b: float) -> Tuple[float, float]:
    # Ties among the outermost values give a zero gap; use the nearest distinct neighbour instead
    if a >= v[0]:
        above = v[v > v[0]]
        a = v[0] - (above[0] - v[0])
    if b <= v[-1]:
        below = v[v < v[-1]]
        b = v[-1] + (v[-1] - below[-1])
    return float(a), float(b)


def resolve_window(
    sorted_sample: SortedSample,
    c: float = DEFAULT_CENSOR_C,
    user_bounds: Optional[Tuple[float, float]] = None,
    symmetry: Optional[SymmetryOption] = None,
) -> DomainSpec:
    """
    Choose the analysis window.

    User bounds are used verbatim. Otherwise the quartile fences censor the
    sample only when some observation actually lies outside them; when none
    does the extension rule widens the window past the extremes. With
    symmetry folding on, the window never extends below the mirror line.
    """
    v = sorted_sample.values
    n = v.size
    if n < MIN_RETAINED:
        raise InsufficientDataError(f"need at least {MIN_RETAINED} observations, got {n}")

    q25 = quantile_empirical(sorted_sample, 0.25)
    q75 = quantile_empirical(sorted_sample, 0.75)

    if user_bounds is not None:
        a, b = float(user_bounds[0]), float(user_bounds[1])
        if not a < b:
            raise DegenerateDomainError(f"user bounds must satisfy min < max, got ({a}, {b})")
    else:
        lo, hi = outlier_bounds(sorted_sample, c)
        if v[0] < lo or v[-1] > hi:
            a, b = lo, hi
        else:
            a, b = _strict_extension(v, *extension_bounds(sorted_sample))

    if symmetry is not None and symmetry.enabled and a < symmetry.center:
        a = float(symmetry.center)

    # closed interval: values equal to a or b are kept
    discarded_low = int(np.searchsorted(v, a, side="left"))
    discarded_high = int(n - np.searchsorted(v, b, side="right"))
    retained = n - discarded_low - discarded_high
    if retained < MIN_RETAINED:
        raise InsufficientDataError(
            f"window [{a}, {b}] keeps {retained} of {n} observations; at least {MIN_RETAINED} are needed"
        )

    censored = (discarded_low + discarded_high) > 0
    if censored:
        logger.info(
            f"Censor window [{a:.6g}, {b:.6g}] discards {discarded_low} low and {discarded_high} high observations"
        )

    return DomainSpec(
        a=a,
        b=b,
        c=c,
        censored=censored,
        discarded_low=discarded_low,
        discarded_high=discarded_high,
        total_count=n,
        q25=q25,
        q75=q75,
    )


def retained_values(sorted_sample: SortedSample, spec: DomainSpec) -> np.ndarray:
    """The sorted observations inside the closed window"""
    v = sorted_sample.values
    return v[spec.discarded_low: v.size - spec.discarded_high]


def to_unit(spec: DomainSpec, v: ArrayLike) -> ArrayLike:
    """x = (2v - b - a) / (b - a)"""
    values = np.asarray(v, dtype=np.float64)
    if np.any(values < spec.a) or np.any(values > spec.b):
        raise ValueError(f"values outside the window [{spec.a}, {spec.b}]")
    x = np.clip((2.0 * values - spec.b - spec.a) / (spec.b - spec.a), -1.0, 1.0)
    return float(x) if np.ndim(v) == 0 else x


def from_unit(spec: DomainSpec, x: ArrayLike) -> ArrayLike:
    """Inverse of to_unit: v = ((b - a) x + a + b) / 2"""
    values = np.asarray(x, dtype=np.float64)
    v = ((spec.b - spec.a) * values + spec.a + spec.b) / 2.0
    return float(v) if np.ndim(x) == 0 else v


def fold_symmetric(sorted_sample: SortedSample, symmetry: SymmetryOption) -> SortedSample:
    """Reflect every value onto the upper side of the mirror line and re-sort"""
    if not symmetry.enabled:
        return sorted_sample
    folded = symmetry.center + np.abs(sorted_sample.values - symmetry.center)
    return SortedSample(values=np.sort(folded, kind="stable"))
