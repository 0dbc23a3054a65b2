import math
import numpy as np

from enum import Enum
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import List, Optional, Tuple

from pdf_forge.models.density import GridConfig, MaxEntModel
from pdf_forge.models.sample import DomainSpec, SymmetryOption
from pdf_forge.models.scoring import ScoreReport


class OptimizerConfig(BaseModel):
    """Funnel diffusion and ensemble settings; defaults are the published ones"""
    model_config = ConfigDict(frozen=True)

    target_coverage: float = 0.40
    floor_coverage: float = 0.05
    initial_sigma: float = 0.1
    decay_rate: float = math.sqrt(2.0) / 2.0
    min_sigma: float = 0.001
    max_failures: int = Field(default=100, ge=1)
    max_multipliers: int = Field(default=300, ge=0)
    stall_percent: float = Field(default=1.0, ge=0.0)
    stall_additions: int = Field(default=3, ge=1)
    solutions_wanted: int = Field(default=5, ge=1)
    max_attempts: int = Field(default=12, ge=1)
    seed: int = 1

    @model_validator(mode="after")
    def _check_ranges(self):
        if not 0.0 < self.floor_coverage < self.target_coverage < 1.0:
            raise ValueError("require 0 < floor_coverage < target_coverage < 1")
        if not 0.0 < self.decay_rate < 1.0:
            raise ValueError("decay_rate must lie in (0, 1)")
        if not 0.0 < self.min_sigma < self.initial_sigma:
            raise ValueError("require 0 < min_sigma < initial_sigma")
        if self.max_attempts < self.solutions_wanted:
            raise ValueError("max_attempts must be >= solutions_wanted")
        return self

    @property
    def sigma_stages(self) -> int:
        """Number of step sizes tried per dimension stage"""
        return int(math.ceil(math.log(self.min_sigma / self.initial_sigma) / math.log(self.decay_rate)))


class FitOptions(BaseModel):
    """How the analysis window and integration grid are chosen"""
    model_config = ConfigDict(frozen=True)

    symmetry: SymmetryOption = SymmetryOption()
    bounds: Optional[Tuple[float, float]] = None
    censor_c: float = Field(default=7.0, gt=0.0)
    grid: GridConfig = GridConfig()


class PartitionLevel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    size: int
    indices: np.ndarray


class PartitionSchedule(BaseModel):
    """Nested rank-subsampled levels; the last level holds every index"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    total: int
    levels: List[PartitionLevel]

    @property
    def sizes(self) -> List[int]:
        return [level.size for level in self.levels]


class SolutionStatus(str, Enum):
    SUCCESS = "success"
    FLOOR_SUCCESS = "floor-success"
    FAILURE = "failure"

    @property
    def accepted(self) -> bool:
        return self is not SolutionStatus.FAILURE


class ProgressEvent(BaseModel):
    """Emitted by the funnel search at every step-size decay"""
    attempt: int
    level: int
    level_size: int
    dimension: int
    sigma: float
    best_score: float
    coverage: float


class SolutionAttempt(BaseModel):
    model_config = ConfigDict(frozen=True)

    attempt: int = 0
    model: MaxEntModel
    report: ScoreReport
    status: SolutionStatus
    dimension_history: List[int] = Field(default_factory=list)
    accepted_scores: List[float] = Field(default_factory=list)
    level_coverages: List[float] = Field(default_factory=list)
    trial_steps: int = 0
    wall_time: float = 0.0


class FitEnsemble(BaseModel):
    """Accepted solutions with the central (minimum pairwise SSE) estimate"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    attempts: List[SolutionAttempt]
    central_index: int
    domain: DomainSpec
    level_sizes: List[int] = Field(default_factory=list)
    pairwise_sse: np.ndarray
    rejected: List[SolutionAttempt] = Field(default_factory=list)
    comparison_grid: Optional[np.ndarray] = None
    densities: Optional[np.ndarray] = None

    @property
    def central(self) -> SolutionAttempt:
        return self.attempts[self.central_index]
