"""
Base template for benchmark distributions.

A template knows its exact pdf and cdf; quantiles come from scipy where a
closed form or special-function inverse exists and from a vectorized
monotone bisection otherwise.
"""
import numpy as np

from abc import ABC, abstractmethod
from scipy import integrate
from typing import Any, Dict, List, Optional, Tuple

from pdf_forge.core.logging import get_logger

logger = get_logger(__name__)

BISECTION_TOLERANCE = 1e-10
BISECTION_MAX_ITERATIONS = 200
NORMALIZATION_TOLERANCE = 1e-8
ROUND_TRIP_TOLERANCE = 1e-6


class DistributionTemplate(ABC):
    """Base template for a known test distribution"""

    name: str = ""
    description: str = ""
    symmetry_center: Optional[float] = None

    def __init__(self, **params: Any):
        self.params: Dict[str, Any] = params

    @property
    @abstractmethod
    def support(self) -> Tuple[float, float]:
        """Interval carrying all probability (may be infinite)"""

    @abstractmethod
    def pdf(self, v: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def cdf(self, v: np.ndarray) -> np.ndarray:
        pass

    def breakpoints(self) -> List[float]:
        """Points the normalization check must not integrate across blindly"""
        return []

    def bracket(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Values known to lie at or below / at or above the quantiles of u"""
        lo, hi = self.support
        return np.full_like(u, lo), np.full_like(u, hi)

    def quantile(self, u: np.ndarray) -> np.ndarray:
        """Vectorized bisection on the cdf down to BISECTION_TOLERANCE"""
        levels = np.asarray(u, dtype=np.float64)
        lo, hi = self.bracket(levels)
        lo, hi = np.array(lo, dtype=np.float64), np.array(hi, dtype=np.float64)
        for _ in range(BISECTION_MAX_ITERATIONS):
            width = hi - lo
            if np.all(width <= BISECTION_TOLERANCE * np.maximum(1.0, np.abs(lo))):
                break
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < levels
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Inverse-transform sampling V = Q(r) with r uniform on [0, 1)"""
        return np.asarray(self.quantile(rng.random(n)))

    def check(self) -> None:
        """Assert unit mass and quantile(cdf(v)) = v on interior points"""
        lo, hi = self.support
        points = self.breakpoints() or None
        if np.isfinite(lo) and np.isfinite(hi):
            mass, _ = integrate.quad(self.pdf, lo, hi, points=points, limit=500, epsabs=1e-12)
        else:
            pieces = [lo] + sorted(self.breakpoints()) + [hi]
            mass = sum(
                integrate.quad(self.pdf, a, b, limit=500, epsabs=1e-12)[0]
                for a, b in zip(pieces[:-1], pieces[1:])
            )
        if abs(mass - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"{self.name}: pdf integrates to {mass!r}")

        interior = np.asarray(self.quantile(np.linspace(0.05, 0.95, 19)))
        round_trip = np.asarray(self.quantile(self.cdf(interior)))
        error = float(np.max(np.abs(round_trip - interior)))
        if error > ROUND_TRIP_TOLERANCE:
            raise ValueError(f"{self.name}: quantile(cdf(v)) misses v by {error:.3e}")
        logger.debug(f"{self.name}: mass {mass:.12f}, round-trip error {error:.2e}")

    def describe(self) -> Dict[str, Any]:
        lo, hi = self.support
        return {
            "name": self.name,
            "description": self.description,
            "params": self.params,
            "support": [lo, hi],
            "symmetry_center": self.symmetry_center,
        }
