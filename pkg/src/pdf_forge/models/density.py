import numpy as np

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Literal, Tuple

from pdf_forge.models.sample import DomainSpec, SymmetryOption


class LagrangeVector(BaseModel):
    """Multipliers lambda_1..lambda_D; D = 0 is the uniform model"""
    model_config = ConfigDict(frozen=True)

    lambdas: Tuple[float, ...] = ()

    @property
    def dimension(self) -> int:
        return len(self.lambdas)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.lambdas, dtype=np.float64)

    @classmethod
    def from_array(cls, values) -> "LagrangeVector":
        return cls(lambdas=tuple(float(v) for v in np.asarray(values, dtype=np.float64)))


class MaxEntModel(BaseModel):
    """
    p_e(x) = exp[Lambda + sum_j lambda_j T_j(x)] on [-1, 1] together with the
    window and symmetry needed to carry it back to original units.

    This is also the persisted model record; JSON floats are written in
    shortest round-trip form so a reload is bit-exact.
    """
    model_config = ConfigDict(frozen=True)

    lagrange: LagrangeVector
    log_norm: float
    domain: DomainSpec
    symmetry: SymmetryOption = SymmetryOption()
    epsilon: float = Field(default=1e-12, gt=0)

    @property
    def dimension(self) -> int:
        return self.lagrange.dimension

    @property
    def multipliers_reported(self) -> int:
        """Multiplier count including lambda_0, the convention of the result tables"""
        return self.dimension + 1


class GridConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    base_points: int = Field(default=200, ge=3)
    slope: float = Field(default=0.005, ge=0)
    max_points: int = 1500
    rule: Literal["linear", "clamped"] = "linear"

    @model_validator(mode="after")
    def _check_cap(self):
        if self.max_points < self.base_points:
            raise ValueError("max_points must be >= base_points")
        return self


class QuadratureGrid(BaseModel):
    """Strictly increasing integration edges spanning exactly [-1, 1]"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    edges: np.ndarray
    nominal_M: int

    @field_validator("edges", mode="before")
    @classmethod
    def _as_array(cls, v):
        array = np.array(v, dtype=np.float64).reshape(-1)
        array.flags.writeable = False
        return array

    @field_validator("edges")
    @classmethod
    def _check_edges(cls, v: np.ndarray):
        if v.size < 3:
            raise ValueError("a grid needs at least 3 edges")
        if v[0] != -1.0 or v[-1] != 1.0:
            raise ValueError("grid must start at -1 and end at 1")
        if np.any(np.diff(v) <= 0):
            raise ValueError("grid edges must be strictly increasing")
        return v

    @property
    def max_spacing(self) -> float:
        return float(np.max(np.diff(self.edges)))


class CdfTable(BaseModel):
    """Model cdf tabulated on grid edges; us runs from exactly 0 to exactly 1"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    xs: np.ndarray
    us: np.ndarray

    @model_validator(mode="after")
    def _check_table(self):
        if self.xs.shape != self.us.shape:
            raise ValueError("xs and us must have the same length")
        if self.us[0] != 0.0 or self.us[-1] != 1.0:
            raise ValueError("cdf table must start at 0 and end at 1")
        if np.any(np.diff(self.us) < 0):
            raise ValueError("cdf table must be nondecreasing")
        return self
