import json
import numpy as np
import pandas as pd

from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from pdf_forge import __version__
from pdf_forge.core.config import settings
from pdf_forge.core.exceptions import EnsembleIncompleteError, PdfForgeError, SampleIOError
from pdf_forge.core.logging import get_logger
from pdf_forge.engine.diagnostics import diagnose, probability_transform
from pdf_forge.engine.domain import from_unit
from pdf_forge.engine.maxent import OriginalScaleDensity, load_model_record, spectral_weight
from pdf_forge.engine.optimizer import fit, model_spread
from pdf_forge.engine.quadrature import table_frame
from pdf_forge.engine.scoring import sqr
from pdf_forge.models.density import GridConfig, MaxEntModel
from pdf_forge.models.fit import FitEnsemble, FitOptions, OptimizerConfig, ProgressEvent
from pdf_forge.models.report import FitOutcome, RunConfig
from pdf_forge.models.sample import RawSample, SymmetryOption
from pdf_forge.models.scoring import ScoringCalibration, SqrSeries
from pdf_forge.services.calibration_service import calibration_service
from pdf_forge.storage.base import ArtifactStore
from pdf_forge.storage.factory import get_artifact_store
from pdf_forge.utils.plotting import pdf_figure, sqr_figure
from pdf_forge.utils.sample_io import format_table, read_sample

MODEL_RECORD = "model.json"
PDF_TABLE = "pdf.csv"
CDF_TABLE = "cdf_table.csv"
SQR_TABLE = "sqr.csv"
SPREAD_TABLE = "spread.csv"
DIAGNOSTICS = "diagnostics.json"
RUN_LOG = "run_log.jsonl"
PDF_SVG = "pdf.svg"
SQR_SVG = "sqr.svg"

# Stream index of the diagnostics generator next to the attempt streams of the optimizer
DIAGNOSTICS_STREAM = 7919

Curve = Callable[[np.ndarray], np.ndarray]


class FitService:
    """Runs fits, assembles their diagnostics and writes the run artifacts"""

    def __init__(self):
        self.logger = get_logger(__name__)
        self.logger.info("Fit service initialized")

    def build_configs(self, config: RunConfig) -> Tuple[FitOptions, OptimizerConfig]:
        symmetry = (
            SymmetryOption(enabled=True, center=config.symmetry_center)
            if config.symmetry_center is not None
            else SymmetryOption()
        )
        options = FitOptions(
            symmetry=symmetry,
            bounds=config.bounds,
            censor_c=config.censor_c,
            grid=GridConfig(rule=settings.grid_rule),
        )
        defaults = OptimizerConfig()
        cfg = OptimizerConfig(
            target_coverage=config.target_coverage,
            # floor < target for every target in (0, 1)
            floor_coverage=min(defaults.floor_coverage, config.target_coverage / 2.0),
            solutions_wanted=config.solutions,
            max_attempts=max(defaults.max_attempts, config.solutions),
            seed=config.seed,
        )
        return options, cfg

    def fit_sample(
        self,
        sample: RawSample,
        config: RunConfig,
        calibration: Optional[ScoringCalibration] = None,
        true_pdf: Optional[Curve] = None,
        true_cdf: Optional[Curve] = None,
        progress: Optional[Callable[[ProgressEvent], None]] = None,
    ) -> FitOutcome:
        """
        Fit one sample without touching the filesystem.

        An incomplete ensemble is returned with `complete=False` rather than
        raised, so callers can still export what was found.
        """
        calibration = calibration or calibration_service.get_calibration(config.calibration_path)
        options, cfg = self.build_configs(config)
        events: List[ProgressEvent] = []

        def record(event: ProgressEvent):
            events.append(event)
            self.logger.debug(
                f"attempt {event.attempt} level {event.level} D={event.dimension} "
                f"sigma={event.sigma:.4g} coverage={event.coverage:.3f}"
            )
            if progress is not None:
                progress(event)

        self.logger.info(f"Fitting {sample.count} values with seed {config.seed}")
        complete, message = True, None
        try:
            ensemble = fit(sample, calibration, options, cfg, progress=record)
        except EnsembleIncompleteError as e:
            self.logger.warning(f"Ensemble incomplete: {e}")
            ensemble, complete, message = e.ensemble, False, str(e)
        except PdfForgeError as e:
            self.logger.error(f"Fit failed: {e}")
            raise

        diagnostics = None
        if ensemble is not None:
            rng = np.random.default_rng(np.random.SeedSequence([config.seed, DIAGNOSTICS_STREAM]))
            diagnostics = diagnose(ensemble, sample, rng, true_pdf=true_pdf, true_cdf=true_cdf)
        return FitOutcome(
            ensemble=ensemble,
            diagnostics=diagnostics,
            complete=complete,
            message=message,
            events=events,
        )

    def pdf_frame(self, ensemble: FitEnsemble) -> pd.DataFrame:
        """Central pdf and cdf on the 1001-point comparison grid in original units"""
        estimate = OriginalScaleDensity(ensemble.central.model)
        v = ensemble.comparison_grid
        return pd.DataFrame({"v": v, "pdf": ensemble.densities[ensemble.central_index], "cdf": estimate.cdf(v)})

    def cdf_frame(self, model: MaxEntModel) -> pd.DataFrame:
        """The model's reference cdf table on [-1, 1] with the matching original-unit abscissa"""
        estimate = OriginalScaleDensity(model)
        frame = table_frame(estimate.table)
        frame.insert(0, "v", from_unit(model.domain, frame["x"].to_numpy()))
        return frame

    def spread_frame(self, ensemble: FitEnsemble) -> Optional[pd.DataFrame]:
        """RMS deviation of the other members from the central pdf; None for a single solution"""
        spread, available = model_spread(ensemble.densities, ensemble.central_index)
        if not available:
            return None
        central = ensemble.densities[ensemble.central_index]
        return pd.DataFrame({"v": ensemble.comparison_grid, "pdf": central, "spread": spread})

    def sqr_series(self, model: MaxEntModel, sample: RawSample) -> SqrSeries:
        return sqr(probability_transform(model, sample))

    def model_record(self, ensemble: FitEnsemble, config: RunConfig, calibration_version: str) -> Dict[str, Any]:
        """Self-describing record of the central model; free of timings so reruns are byte-identical"""
        central = ensemble.central
        return {
            "format": "pdf-forge/model",
            "version": __version__,
            "calibration": calibration_version,
            "seed": config.seed,
            "config": config.model_dump(mode="json", exclude={"output_dir", "force", "emit_svg"}),
            "model": central.model.model_dump(mode="json"),
            "summary": {
                "status": central.status.value,
                "dimension": central.model.dimension,
                "multipliers_reported": central.model.multipliers_reported,
                "spectral_weight": spectral_weight(central.model.lagrange),
                "score": central.report.effective,
                "coverage": central.report.coverage,
                "raw_coverage": central.report.raw_coverage,
            },
            "ensemble": {
                "solutions": len(ensemble.attempts),
                "central_index": ensemble.central_index,
                "level_sizes": ensemble.level_sizes,
                "rejected": len(ensemble.rejected),
                "members": [
                    {
                        "attempt": a.attempt,
                        "status": a.status.value,
                        "dimension": a.model.dimension,
                        "coverage": a.report.coverage,
                        "trial_steps": a.trial_steps,
                        "dimension_history": a.dimension_history,
                    }
                    for a in ensemble.attempts
                ],
                "pairwise_sse": ensemble.pairwise_sse.tolist(),
            },
        }

    def run_log(self, outcome: FitOutcome) -> str:
        lines = [event.model_dump_json() for event in outcome.events]
        if outcome.ensemble is not None:
            for attempt in outcome.ensemble.attempts + outcome.ensemble.rejected:
                lines.append(
                    json.dumps(
                        {
                            "attempt": attempt.attempt,
                            "status": attempt.status.value,
                            "dimension": attempt.model.dimension,
                            "coverage": attempt.report.coverage,
                            "level_coverages": attempt.level_coverages,
                            "trial_steps": attempt.trial_steps,
                            "wall_time": attempt.wall_time,
                        }
                    )
                )
        if outcome.message:
            lines.append(json.dumps({"error": outcome.message}))
        return "".join(line + "\n" for line in lines)

    def write_artifacts(
        self,
        store: ArtifactStore,
        outcome: FitOutcome,
        sample: RawSample,
        config: RunConfig,
        calibration_version: str,
    ) -> List[str]:
        written = [store.save_text(RUN_LOG, self.run_log(outcome))]
        ensemble = outcome.ensemble
        if ensemble is None:
            return written

        record = self.model_record(ensemble, config, calibration_version)
        written.append(store.save_text(MODEL_RECORD, json.dumps(record, indent=2)))

        pdf = self.pdf_frame(ensemble)
        written.append(store.save_text(PDF_TABLE, format_table(pdf)))
        written.append(store.save_text(CDF_TABLE, format_table(self.cdf_frame(ensemble.central.model))))

        series = self.sqr_series(ensemble.central.model, sample)
        written.append(store.save_text(SQR_TABLE, format_table(pd.DataFrame({"mu": series.mu, "delta": series.delta}))))

        spread = self.spread_frame(ensemble)
        if spread is not None:
            written.append(store.save_text(SPREAD_TABLE, format_table(spread)))
        else:
            self.logger.info("Single solution requested: no ensemble spread file is written")

        if outcome.diagnostics is not None:
            payload = outcome.diagnostics.model_dump(mode="json")
            payload["table"] = outcome.diagnostics.table_record()
            written.append(store.save_json(DIAGNOSTICS, payload))

        if config.emit_svg:
            band = spread["spread"].to_numpy() if spread is not None else None
            written.append(store.save_text(PDF_SVG, pdf_figure(pdf["v"].to_numpy(), pdf["pdf"].to_numpy(), band)))
            written.append(store.save_text(SQR_SVG, sqr_figure(series)))
        return written

    def run(
        self, config: RunConfig, progress: Optional[Callable[[ProgressEvent], None]] = None
    ) -> FitOutcome:
        """
        Fit the input file and write every artifact to the output directory.

        Input errors surface before the output directory is created. An
        incomplete ensemble still gets its partial artifacts, then
        EnsembleIncompleteError is raised.
        """
        if config.input_path is None:
            raise ValueError("an input file is required")
        sample = read_sample(config.input_path)
        calibration = calibration_service.get_calibration(config.calibration_path)

        store = get_artifact_store(config.output_dir, force=config.force)
        names = [MODEL_RECORD, PDF_TABLE, CDF_TABLE, SQR_TABLE, SPREAD_TABLE, DIAGNOSTICS, RUN_LOG]
        if config.emit_svg:
            names += [PDF_SVG, SQR_SVG]
        store.check_writable(names)

        outcome = self.fit_sample(sample, config, calibration, progress=progress)
        outcome.artifacts = self.write_artifacts(store, outcome, sample, config, calibration.version)
        self.logger.info(f"Wrote {len(outcome.artifacts)} artifacts to {config.output_dir}")

        if not outcome.complete:
            ensemble = outcome.ensemble
            raise EnsembleIncompleteError(
                outcome.message or "ensemble incomplete",
                attempts=(ensemble.attempts + ensemble.rejected) if ensemble else [],
                ensemble=ensemble,
            )
        return outcome

    def recompute_sqr(
        self,
        model_path: str,
        sample_path: str,
        out_dir: str,
        force: bool = False,
        emit_svg: bool = False,
    ) -> SqrSeries:
        """SQR series of a stored model against a sample file"""
        try:
            text = Path(model_path).read_text()
        except OSError as e:
            raise SampleIOError(f"cannot read model file {model_path}: {e}") from e
        model = load_model_record(text)
        sample = read_sample(sample_path)
        series = self.sqr_series(model, sample)

        store = get_artifact_store(out_dir, force=force)
        store.save_text(SQR_TABLE, format_table(pd.DataFrame({"mu": series.mu, "delta": series.delta})))
        if emit_svg:
            store.save_text(SQR_SVG, sqr_figure(series))
        self.logger.info(f"SQR series of {series.mu.size} points, max |delta| = {series.max_abs:.3f}")
        return series


# Global fit service instance
fit_service = FitService()
