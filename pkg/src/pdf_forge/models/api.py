import math

from pydantic import BaseModel, Field, field_validator
from typing import Any, Dict, List, Optional, Tuple


class DistributionInfo(BaseModel):
    name: str
    description: str
    params: Dict[str, Any] = Field(default_factory=dict)
    # None marks an unbounded side; JSON has no infinity
    support: Tuple[Optional[float], Optional[float]]
    symmetry_center: Optional[float] = None

    @field_validator("support", mode="before")
    @classmethod
    def finite_support(cls, v):
        return tuple(float(x) if math.isfinite(x) else None for x in v)


class SampleRequest(BaseModel):
    n: int = Field(..., ge=1, le=2 ** 22)
    seed: int = 1
    params: Dict[str, Any] = Field(default_factory=dict)


class SampleResponse(BaseModel):
    distribution: str
    seed: int
    values: List[float]


class FitRequest(BaseModel):
    values: List[float] = Field(..., min_length=1)
    seed: int = 1
    coverage: float = Field(default=0.40, gt=0.0, lt=1.0)
    solutions: int = Field(default=5, ge=1, le=50)
    symmetric_center: Optional[float] = None
    bounds: Optional[Tuple[float, float]] = None
    censor_c: float = Field(default=7.0, gt=0.0)

    @field_validator("bounds")
    @classmethod
    def validate_bounds(cls, v):
        if v is not None and not v[0] < v[1]:
            raise ValueError(f"lower bound must be below upper bound, got {v}")
        return v


class EnsembleSummary(BaseModel):
    solutions: int
    central_index: int
    rejected: int
    level_sizes: List[int]
    statuses: List[str]
    coverages: List[float]


class FitResponse(BaseModel):
    complete: bool
    message: Optional[str] = None
    model: Optional[Dict[str, Any]] = None
    ensemble: Optional[EnsembleSummary] = None
    diagnostics: Optional[Dict[str, Any]] = None
    pdf: Optional[Dict[str, List[float]]] = None


class CalibrationResponse(BaseModel):
    version: str
    seed: Optional[int] = None
    sizes: List[int]
    trials_per_size: Dict[int, int]
    target_L: float
    floor_L: float
    mean_L: float
    window_90: Tuple[float, float]
    slope: Optional[float] = None
    intercept: Optional[float] = None
    expected_size_means: Dict[int, float] = Field(default_factory=dict)
