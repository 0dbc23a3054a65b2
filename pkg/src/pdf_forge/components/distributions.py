"""
Benchmark distributions with exact pdf, cdf and quantile functions.
"""
import numpy as np

from scipy import stats
from typing import List, Tuple

from pdf_forge.components.base import DistributionTemplate


class ScipyDistributionTemplate(DistributionTemplate):
    """Template backed by a frozen scipy.stats distribution"""

    def __init__(self, frozen, **params):
        super().__init__(**params)
        self._frozen = frozen

    @property
    def support(self) -> Tuple[float, float]:
        lo, hi = self._frozen.support()
        return float(lo), float(hi)

    def pdf(self, v):
        return self._frozen.pdf(v)

    def cdf(self, v):
        return self._frozen.cdf(v)

    def quantile(self, u):
        return self._frozen.ppf(u)


class UniformTemplate(ScipyDistributionTemplate):
    name = "uniform"
    description = "p(v) = 1/2 on [-1, 1]"

    def __init__(self):
        super().__init__(stats.uniform(loc=-1.0, scale=2.0))


class NormalTemplate(ScipyDistributionTemplate):
    name = "normal"
    description = "standard normal"
    symmetry_center = 0.0

    def __init__(self):
        super().__init__(stats.norm())

    def breakpoints(self) -> List[float]:
        return [0.0]


class LaplaceTemplate(ScipyDistributionTemplate):
    name = "laplace"
    description = "p(v) = exp(-|v|) / 2"
    symmetry_center = 0.0

    def __init__(self):
        super().__init__(stats.laplace(loc=0.0, scale=1.0))

    def breakpoints(self) -> List[float]:
        return [0.0]


class GammaTemplate(ScipyDistributionTemplate):
    """Shape 1/2: p(v) = exp(-v) / sqrt(pi v), singular at 0; ppf inverts the regularized incomplete gamma"""
    name = "gamma"
    description = "p(v) = exp(-v) / sqrt(pi v) on (0, inf)"

    def __init__(self, shape: float = 0.5):
        if shape <= 0:
            raise ValueError(f"gamma shape must be positive, got {shape}")
        super().__init__(stats.gamma(a=shape), shape=shape)

    def breakpoints(self) -> List[float]:
        return [1.0]


class CauchyTemplate(ScipyDistributionTemplate):
    name = "cauchy"
    description = "p(v) = b / (pi (v^2 + b^2)), b = 1/2"
    symmetry_center = 0.0

    def __init__(self, scale: float = 0.5):
        if scale <= 0:
            raise ValueError(f"cauchy scale must be positive, got {scale}")
        super().__init__(stats.cauchy(loc=0.0, scale=scale), scale=scale)

    def breakpoints(self) -> List[float]:
        return [0.0]


class GaussianMixtureTemplate(DistributionTemplate):
    name = "two-gaussians"
    description = "7/10 N(5, 3) + 3/10 N(0, 1/2)"

    def __init__(self, weights=(0.7, 0.3), means=(5.0, 0.0), sigmas=(3.0, 0.5)):
        weights = np.asarray(weights, dtype=np.float64)
        if np.any(weights < 0) or not np.isclose(weights.sum(), 1.0):
            raise ValueError("mixture weights must be nonnegative and sum to 1")
        if np.any(np.asarray(sigmas) <= 0):
            raise ValueError("mixture standard deviations must be positive")
        super().__init__(weights=list(weights), means=list(means), sigmas=list(sigmas))
        self.weights = weights
        self.components = [stats.norm(loc=m, scale=s) for m, s in zip(means, sigmas)]

    @property
    def support(self) -> Tuple[float, float]:
        return -np.inf, np.inf

    def breakpoints(self) -> List[float]:
        return sorted(float(c.mean()) for c in self.components)

    def pdf(self, v):
        return sum(w * c.pdf(v) for w, c in zip(self.weights, self.components))

    def cdf(self, v):
        return sum(w * c.cdf(v) for w, c in zip(self.weights, self.components))

    def bracket(self, u):
        # a mixture quantile lies between its components' quantiles
        levels = np.clip(u, 1e-300, 1.0 - 1e-16)
        ppfs = np.stack([c.ppf(levels) for c in self.components])
        return ppfs.min(axis=0), ppfs.max(axis=0)


class FiveFingersTemplate(DistributionTemplate):
    """
    Five sharp Gaussians (sigma = 0.01, centers 0.1, 0.3, ..., 0.9) carrying
    weight w on top of a uniform floor 1 - w on [0, 1]. The Gaussian tails
    outside [0, 1] are negligible, so nothing is renormalized.
    """
    name = "fingers"
    sigma = 0.01

    def __init__(self, weight: float = 0.5):
        if not 0.0 <= weight <= 1.0:
            raise ValueError(f"finger weight w must lie in [0, 1], got {weight}")
        super().__init__(weight=weight)
        self.weight = weight
        self.centers = (2.0 * np.arange(1, 6) - 1.0) / 10.0
        self._cdf_at_zero = float(stats.norm.cdf(0.0, loc=self.centers, scale=self.sigma).sum())

    @property
    def description(self) -> str:
        return f"w * sum_k N(v | (2k-1)/10, 0.01) / 5 + (1 - w) on [0, 1], w = {self.weight}"

    @property
    def support(self) -> Tuple[float, float]:
        return 0.0, 1.0

    def breakpoints(self) -> List[float]:
        return self.centers.tolist()

    def pdf(self, v):
        values = np.asarray(v, dtype=np.float64)
        peaks = stats.norm.pdf(values[..., None], loc=self.centers, scale=self.sigma).sum(axis=-1)
        p = self.weight * peaks / 5.0 + (1.0 - self.weight)
        return np.where((values >= 0.0) & (values <= 1.0), p, 0.0)

    def cdf(self, v):
        values = np.clip(np.asarray(v, dtype=np.float64), 0.0, 1.0)
        peaks = stats.norm.cdf(values[..., None], loc=self.centers, scale=self.sigma).sum(axis=-1)
        return self.weight * (peaks - self._cdf_at_zero) / 5.0 + (1.0 - self.weight) * values


class DiscontinuousTemplate(DistributionTemplate):
    """
    Piecewise constant on [0, 1]: 4/5 below 0.3 and above 0.8, 1 on [0.4, 0.5]
    and 5/4 on the rest. The cdf is linear between the breakpoints, so the
    quantile is its exact piecewise-linear inverse.
    """
    name = "discontinuous"
    description = "piecewise constant density 4/5, 5/4, 1, 5/4, 4/5 on [0, 1]"
    knots = np.array([0.0, 0.3, 0.4, 0.5, 0.8, 1.0])
    levels = np.array([0.8, 1.25, 1.0, 1.25, 0.8])

    def __init__(self):
        super().__init__()
        self.cumulative = np.concatenate(([0.0], np.cumsum(self.levels * np.diff(self.knots))))
        self.cumulative[-1] = 1.0

    @property
    def support(self) -> Tuple[float, float]:
        return 0.0, 1.0

    def breakpoints(self) -> List[float]:
        return self.knots[1:-1].tolist()

    def pdf(self, v):
        values = np.asarray(v, dtype=np.float64)
        # boundary points between 1 and 5/4 belong to the 5/4 pieces
        piece = np.clip(np.searchsorted(self.knots, values, side="right") - 1, 0, self.levels.size - 1)
        p = np.where(np.isin(values, self.knots[1:-1]), 1.25, self.levels[piece])
        return np.where((values >= 0.0) & (values <= 1.0), p, 0.0)

    def cdf(self, v):
        return np.interp(v, self.knots, self.cumulative)

    def quantile(self, u):
        return np.interp(u, self.cumulative, self.knots)
