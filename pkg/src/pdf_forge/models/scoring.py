import numpy as np

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator
from typing import Dict, List, Optional


CALIBRATION_VERSION = "surd-loglike/1"
QUANTILE_LEVELS = np.linspace(0.0, 1.0, 1001)


class UnitSortedSample(BaseModel):
    """
    Sorted values on [0, 1] produced by a trial cdf.

    `full_count` is the size of the whole sample when `u` is a hierarchical
    partition of it; it equals `count` otherwise.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    u: np.ndarray
    full_count: int = Field(default=0, ge=0)

    @field_validator("u", mode="before")
    @classmethod
    def _as_array(cls, v):
        array = np.array(v, dtype=np.float64).reshape(-1)
        array.flags.writeable = False
        return array

    @field_validator("u")
    @classmethod
    def _check_unit(cls, v: np.ndarray):
        if v.size == 0:
            raise ValueError("u must hold at least one value")
        if np.any(v < 0.0) or np.any(v > 1.0):
            raise ValueError("u values must lie in [0, 1]")
        if np.any(np.diff(v) < 0):
            raise ValueError("u values must be nondecreasing")
        return v

    @property
    def count(self) -> int:
        return int(self.u.size)

    @property
    def total(self) -> int:
        return self.full_count or self.count


class ScoreReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    raw_loglike: float
    penalty: float = Field(ge=0.0)
    effective: float
    coverage: float = Field(ge=0.0, le=1.0)
    raw_coverage: float = Field(default=0.0, ge=0.0, le=1.0)

    @property
    def is_finite(self) -> bool:
        return bool(np.isfinite(self.effective))


class SqrSeries(BaseModel):
    """Scaled residual quantile pairs (mu_s, Delta_s)"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mu: np.ndarray
    delta: np.ndarray

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.delta)))


class ScoringCalibration(BaseModel):
    """
    Pooled distribution of the SURD log-likelihood metric L stored as a
    table of 1001 quantiles at levels 0.000, 0.001, ..., 1.000.
    """
    model_config = ConfigDict(frozen=True)

    version: str = CALIBRATION_VERSION
    seed: Optional[int] = None
    sizes: List[int] = Field(default_factory=list)
    trials_per_size: Dict[int, int] = Field(default_factory=dict)
    size_means: Dict[int, float] = Field(default_factory=dict)
    slope: Optional[float] = None
    intercept: Optional[float] = None
    pooled_mean: float
    quantiles: List[float]

    _table: np.ndarray = PrivateAttr()

    def model_post_init(self, __context) -> None:
        self._table = np.asarray(self.quantiles, dtype=np.float64)

    @field_validator("quantiles")
    @classmethod
    def _check_quantiles(cls, v: List[float]):
        if len(v) != QUANTILE_LEVELS.size:
            raise ValueError(f"expected {QUANTILE_LEVELS.size} quantiles, got {len(v)}")
        if np.any(np.diff(v) < 0):
            raise ValueError("quantiles must be nondecreasing")
        return v

    def coverage(self, score: float) -> float:
        """Fraction of the SURD L distribution lying at or below `score`"""
        if not np.isfinite(score):
            return 0.0 if score < 0 else 1.0
        table = self._table
        if score < table[0]:
            return 0.0
        if score >= table[-1]:
            return 1.0
        # rightmost level among tied quantiles keeps coverage an upper cdf
        idx = int(np.searchsorted(table, score, side="right"))
        lo, hi = table[idx - 1], table[idx]
        t = (score - lo) / (hi - lo) if hi > lo else 1.0
        return float(QUANTILE_LEVELS[idx - 1] + t * (QUANTILE_LEVELS[idx] - QUANTILE_LEVELS[idx - 1]))

    def threshold(self, coverage: float) -> float:
        """L value at the given coverage level"""
        if not 0.0 <= coverage <= 1.0:
            raise ValueError(f"coverage must be in [0, 1], got {coverage}")
        return float(np.interp(coverage, QUANTILE_LEVELS, self._table))

    @property
    def target_L(self) -> float:
        return self.threshold(0.40)

    @property
    def floor_L(self) -> float:
        return self.threshold(0.05)

    @property
    def mean_L(self) -> float:
        return self.pooled_mean
