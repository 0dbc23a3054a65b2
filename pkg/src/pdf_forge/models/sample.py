import numpy as np

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Optional


def _frozen_array(values) -> np.ndarray:
    array = np.array(values, dtype=np.float64).reshape(-1)
    array.flags.writeable = False
    return array


class RawSample(BaseModel):
    """An i.i.d. sample in original units, in input order"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, v):
        return _frozen_array(v)

    @property
    def count(self) -> int:
        return int(self.values.size)


class SortedSample(BaseModel):
    """Nondecreasing copy of a sample (V^(1) .. V^(N))"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, v):
        return _frozen_array(v)

    @field_validator("values")
    @classmethod
    def _check_sorted(cls, v: np.ndarray):
        if v.size > 1 and np.any(np.diff(v) < 0):
            raise ValueError("values must be nondecreasing")
        return v

    @property
    def count(self) -> int:
        return int(self.values.size)


class SymmetryOption(BaseModel):
    """Mirror symmetry about `center`; folding maps v -> center + |v - center|"""
    model_config = ConfigDict(frozen=True)

    enabled: bool = False
    center: float = 0.0


class DomainSpec(BaseModel):
    """Analysis window [a, b] and the bookkeeping of what was censored"""
    model_config = ConfigDict(frozen=True)

    a: float
    b: float
    c: float = 7.0
    censored: bool = False
    discarded_low: int = 0
    discarded_high: int = 0
    total_count: int = Field(ge=1)
    q25: Optional[float] = None
    q75: Optional[float] = None

    @model_validator(mode="after")
    def _check_window(self):
        if not self.a < self.b:
            raise ValueError(f"window requires a < b, got a={self.a}, b={self.b}")
        if self.discarded_low < 0 or self.discarded_high < 0:
            raise ValueError("discard counts must be nonnegative")
        if self.retained_count < 1:
            raise ValueError("window must retain at least one observation")
        return self

    @property
    def retained_count(self) -> int:
        return self.total_count - self.discarded_low - self.discarded_high

    @property
    def retained_ratio(self) -> float:
        """R_ab, the fraction of the sample inside the window"""
        return self.retained_count / self.total_count

    @property
    def low_mass(self) -> float:
        """Empirical probability below the window"""
        return self.discarded_low / self.total_count
