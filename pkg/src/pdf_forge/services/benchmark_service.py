import time
import numpy as np
import pandas as pd

from typing import Callable, List, Optional, Sequence

from pdf_forge.components.registry import BENCHMARK_DISTRIBUTIONS, make_distribution, sample_distribution
from pdf_forge.core.exceptions import PdfForgeError
from pdf_forge.core.logging import get_logger
from pdf_forge.engine.diagnostics import correlation_export
from pdf_forge.models.report import TABLE_COLUMNS, BenchmarkRow, RunConfig
from pdf_forge.models.scoring import ScoringCalibration
from pdf_forge.services.calibration_service import calibration_service
from pdf_forge.services.fit_service import fit_service
from pdf_forge.storage.base import ArtifactStore
from pdf_forge.storage.factory import get_artifact_store
from pdf_forge.utils.sample_io import format_table

DESK_SIZES = [2 ** 8, 2 ** 12]
FULL_SIZES = [2 ** 16, 2 ** 20]
SAMPLES_PER_SIZE = 4

ROWS_TABLE = "benchmark.csv"
TIMING_TABLE = "timing.csv"
CORRELATION_TABLE = "correlation.csv"


class BenchmarkService:
    """Draws samples from the test distributions, fits them and scores the central model against the truth"""

    def __init__(self):
        self.logger = get_logger(__name__)

    def row_seeds(self, seed: int, count: int) -> List[int]:
        """Independent per-row seeds derived from the master seed"""
        return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(count)]

    def run_benchmark(
        self,
        dists: Optional[Sequence[str]] = None,
        sizes: Optional[Sequence[int]] = None,
        samples_per_size: int = SAMPLES_PER_SIZE,
        solutions_per_sample: int = 5,
        seed: int = 1,
        calibration: Optional[ScoringCalibration] = None,
        use_symmetry: bool = False,
        on_row: Optional[Callable[[BenchmarkRow], None]] = None,
    ) -> List[BenchmarkRow]:
        """
        One row per (distribution, size, sample index). A failed fit is recorded
        in its row and the harness moves on.
        """
        dists = list(dists or BENCHMARK_DISTRIBUTIONS)
        sizes = list(sizes or DESK_SIZES)
        if samples_per_size < 1:
            raise ValueError("samples_per_size must be positive")
        calibration = calibration or calibration_service.get_calibration()
        templates = {name: make_distribution(name) for name in dists}

        jobs = [(name, n, k) for name in dists for n in sizes for k in range(samples_per_size)]
        seeds = self.row_seeds(seed, len(jobs))
        self.logger.info(f"Benchmark: {len(jobs)} rows over {dists} at sizes {sizes}")

        rows: List[BenchmarkRow] = []
        for (name, n, k), row_seed in zip(jobs, seeds):
            dist = templates[name]
            sample = sample_distribution(dist, n, np.random.default_rng(row_seed))
            config = RunConfig(
                seed=row_seed,
                solutions=solutions_per_sample,
                symmetry_center=dist.symmetry_center if use_symmetry else None,
            )
            started = time.perf_counter()
            try:
                outcome = fit_service.fit_sample(sample, config, calibration, true_pdf=dist.pdf, true_cdf=dist.cdf)
            except PdfForgeError as e:
                self.logger.error(f"{name} N={n} sample {k}: {e}")
                row = BenchmarkRow(
                    distribution=name,
                    sample_size=n,
                    sample_index=k,
                    seed=row_seed,
                    status="error",
                    milliseconds=1000.0 * (time.perf_counter() - started),
                    error=str(e),
                )
            else:
                elapsed = 1000.0 * (time.perf_counter() - started)
                report = outcome.diagnostics
                status = outcome.ensemble.central.status.value if outcome.ensemble is not None else "failure"
                if not outcome.complete:
                    status = "incomplete"
                row = BenchmarkRow(
                    distribution=name,
                    sample_size=n,
                    sample_index=k,
                    seed=row_seed,
                    status=status,
                    ks_p=report.ks_p if report else None,
                    kl=report.kl if report else None,
                    fom=report.fom if report else None,
                    surd_coverage=report.surd_coverage if report else None,
                    multipliers_reported=report.multipliers_reported if report else None,
                    milliseconds=elapsed,
                    error=outcome.message,
                )
            self.logger.info(
                f"{name} N={n} sample {k}: {row.status}, KL={row.kl}, {row.milliseconds:.0f} ms"
            )
            rows.append(row)
            if on_row is not None:
                on_row(row)
        return rows

    def rows_frame(self, rows: List[BenchmarkRow]) -> pd.DataFrame:
        """Rows under the result-table headers plus distribution, seed and timing columns"""
        frame = pd.DataFrame([row.model_dump() for row in rows])
        frame = frame.rename(columns=TABLE_COLUMNS)
        columns = ["distribution", "sample_size", "sample_index", "seed", "status"]
        columns += list(TABLE_COLUMNS.values()) + ["milliseconds", "error"]
        return frame[columns]

    def timing_summary(self, rows: List[BenchmarkRow]) -> pd.DataFrame:
        """Mean fit time per (distribution, N), for log-log timing plots"""
        frame = pd.DataFrame([row.model_dump() for row in rows])
        summary = frame.groupby(["distribution", "sample_size"], sort=False)["milliseconds"].mean()
        return summary.reset_index().rename(columns={"sample_size": "N", "milliseconds": "mean_ms"})

    def prepare_output(self, out_dir: str, force: bool = False) -> ArtifactStore:
        """Fail before any fitting if the result tables would be overwritten"""
        store = get_artifact_store(out_dir, force=force)
        store.check_writable([ROWS_TABLE, TIMING_TABLE, CORRELATION_TABLE])
        return store

    def write(self, rows: List[BenchmarkRow], store: ArtifactStore) -> List[str]:
        written = [
            store.save_text(ROWS_TABLE, format_table(self.rows_frame(rows))),
            store.save_text(TIMING_TABLE, format_table(self.timing_summary(rows))),
        ]
        if any(row.ks_p is not None and row.fom is not None for row in rows):
            written.append(store.save_text(CORRELATION_TABLE, format_table(correlation_export(rows))))
        else:
            self.logger.warning("No row has both a KS p-value and a figure of merit; correlation table skipped")
        return written


# Global benchmark service instance
benchmark_service = BenchmarkService()
