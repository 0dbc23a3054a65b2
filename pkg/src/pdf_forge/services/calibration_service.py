import math

from pathlib import Path
from typing import Any, Dict, Iterable, Optional

from pydantic import ValidationError

from pdf_forge.core.config import settings
from pdf_forge.core.exceptions import CalibrationError, SampleIOError
from pdf_forge.core.logging import get_logger
from pdf_forge.engine.scoring import calibrate, coverage_window, expected_loglike
from pdf_forge.models.scoring import ScoringCalibration
from pdf_forge.storage.factory import get_artifact_store

BUNDLED_CALIBRATION = Path(__file__).resolve().parent.parent / "data" / "calibration.json"


class CalibrationService:
    """
    Resolves the scoring calibration used by every fit.

    Lookup order: an explicit path, settings.calibration_path, the calibration
    bundled with the package (data/calibration.json), then a desk calibration
    generated once per process from the configured sizes/trials/seed. The desk
    calibration is kept in memory unless settings.calibration_cache_dir names
    a directory to cache it in.
    """

    def __init__(self):
        self.logger = get_logger(__name__)
        self._loaded: Dict[str, ScoringCalibration] = {}

    def load(self, path: str) -> ScoringCalibration:
        """Read a calibration artifact; results are cached per path"""
        if path in self._loaded:
            return self._loaded[path]
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise SampleIOError(f"cannot read calibration {path}: {e}") from e
        try:
            calibration = ScoringCalibration.model_validate_json(text)
        except ValidationError as e:
            raise CalibrationError(f"{path} is not a valid calibration artifact: {e}") from e
        self.logger.info(f"Loaded calibration {calibration.version} from {path}")
        self._loaded[path] = calibration
        return calibration

    def _desk_key(self) -> str:
        sizes = "-".join(str(n) for n in settings.calibration_sizes)
        return f"desk-{settings.calibration_seed}-{settings.calibration_trials}-{sizes}.json"

    def _desk_calibration(self) -> ScoringCalibration:
        self.logger.info(
            f"No calibration artifact found; generating a desk calibration "
            f"({settings.calibration_trials} trials per size, sizes {settings.calibration_sizes})"
        )
        # A desk run is accepted even if the size-law gates miss; the miss is logged
        return calibrate(
            settings.calibration_sizes,
            settings.calibration_trials,
            seed=settings.calibration_seed,
            verify=False,
        )

    def get_calibration(self, path: Optional[str] = None) -> ScoringCalibration:
        explicit = path or settings.calibration_path
        if explicit:
            return self.load(explicit)
        if BUNDLED_CALIBRATION.exists():
            return self.load(str(BUNDLED_CALIBRATION))

        key = self._desk_key()
        if key in self._loaded:
            return self._loaded[key]
        if settings.calibration_cache_dir is None:
            # memory only: nothing is written outside the run's output directory
            calibration = self._desk_calibration()
        else:
            store = get_artifact_store(settings.calibration_cache_dir, force=True)
            cached = store.get_text(key)
            if cached is not None:
                calibration = ScoringCalibration.model_validate_json(cached)
                self.logger.info(f"Using cached desk calibration {key}")
            else:
                calibration = self._desk_calibration()
                store.save_text(key, calibration.model_dump_json(indent=2))
        self._loaded[key] = calibration
        return calibration

    def regenerate(
        self,
        sizes: Iterable[int],
        trials: int,
        seed: int,
        out_path: Optional[str] = None,
        force: bool = False,
        verify: bool = True,
    ) -> ScoringCalibration:
        """Run a fresh Monte Carlo calibration and optionally write it as an artifact"""
        try:
            calibration = calibrate(sizes, trials, seed=seed, verify=verify)
        except CalibrationError as e:
            self.logger.error(f"Calibration failed: {e}")
            raise

        if out_path:
            target = Path(out_path)
            store = get_artifact_store(str(target.parent), force=force)
            store.save_text(target.name, calibration.model_dump_json(indent=2))
            self.logger.info(f"Wrote calibration to {target}")
        return calibration

    def summary(self, calibration: ScoringCalibration) -> Dict[str, Any]:
        """Decision thresholds and provenance of a calibration"""
        low, high = coverage_window(calibration)
        return {
            "version": calibration.version,
            "seed": calibration.seed,
            "sizes": calibration.sizes,
            "trials_per_size": calibration.trials_per_size,
            "target_L": calibration.target_L,
            "floor_L": calibration.floor_L,
            "mean_L": calibration.mean_L,
            "window_90": [low, high],
            "slope": calibration.slope,
            "intercept": calibration.intercept,
            "expected_size_means": {n: expected_loglike(n) + 0.5 * math.log(n) for n in calibration.sizes},
        }


# Global calibration service instance
calibration_service = CalibrationService()
