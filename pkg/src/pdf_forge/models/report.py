from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Dict, List, Optional, Tuple

from pdf_forge.models.fit import FitEnsemble, ProgressEvent


# Column headers of the published result tables
TABLE_COLUMNS: Dict[str, str] = {
    "ks_p": "p-value",
    "kl": "KL distance",
    "fom": "Figure of Merit",
    "surd_coverage": "SURD coverage",
    "multipliers_reported": "Lagrange Multipliers",
}


class DiagnosticsReport(BaseModel):
    """Quality metrics of a central estimate; KS and KL need the true distribution"""
    model_config = ConfigDict(frozen=True)

    ks_stat: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    ks_p: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    kl: Optional[float] = Field(default=None, ge=0.0)
    fom: Optional[float] = Field(default=None, le=1.0)
    fom_excluded_ranks: int = 0
    surd_coverage: float = Field(ge=0.0, le=1.0)
    raw_coverage: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    multipliers_reported: int = Field(ge=1)

    def table_record(self) -> Dict[str, Optional[float]]:
        """Fields keyed by the result-table column names"""
        return {header: getattr(self, field) for field, header in TABLE_COLUMNS.items()}


class BenchmarkRow(BaseModel):
    distribution: str
    sample_size: int
    sample_index: int
    seed: int
    status: str
    ks_p: Optional[float] = None
    kl: Optional[float] = None
    fom: Optional[float] = None
    surd_coverage: Optional[float] = None
    multipliers_reported: Optional[int] = None
    milliseconds: float = 0.0
    error: Optional[str] = None


class RunConfig(BaseModel):
    """Options of one `fit` run; defaults are the published defaults"""
    model_config = ConfigDict(frozen=True)

    input_path: Optional[str] = None
    output_dir: str = "./fit-output"
    seed: int = 1
    target_coverage: float = Field(default=0.40, gt=0.0, lt=1.0)
    solutions: int = Field(default=5, ge=1)
    symmetry_center: Optional[float] = None
    bounds: Optional[Tuple[float, float]] = None
    censor_c: float = Field(default=7.0, gt=0.0)
    emit_svg: bool = False
    force: bool = False
    calibration_path: Optional[str] = None

    @model_validator(mode="after")
    def _check_bounds(self):
        if self.bounds is not None and not self.bounds[0] < self.bounds[1]:
            raise ValueError(f"--min must be below --max, got {self.bounds}")
        return self


class FitOutcome(BaseModel):
    """Everything one fit produced; `ensemble` may be partial when `complete` is False"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    ensemble: Optional[FitEnsemble] = None
    diagnostics: Optional[DiagnosticsReport] = None
    complete: bool = True
    message: Optional[str] = None
    events: List[ProgressEvent] = Field(default_factory=list)
    artifacts: List[str] = Field(default_factory=list)
