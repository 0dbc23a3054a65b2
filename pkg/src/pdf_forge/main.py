import sys
import argparse
import numpy as np

from pathlib import Path
from typing import Any, Dict, List, Optional

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from pydantic import ValidationError

from pdf_forge import __version__
from pdf_forge.core.config import settings
from pdf_forge.core.exceptions import EXIT_OK, EXIT_USAGE, PdfForgeError
from pdf_forge.core.logging import setup_logging, get_logger
from pdf_forge.api.routes import router as api_router
from pdf_forge.components.registry import make_distribution, sample_distribution
from pdf_forge.engine.scoring import MIN_CALIBRATION_TRIALS
from pdf_forge.models.report import RunConfig
from pdf_forge.services.benchmark_service import DESK_SIZES, FULL_SIZES, benchmark_service
from pdf_forge.services.calibration_service import calibration_service
from pdf_forge.services.fit_service import fit_service
from pdf_forge.storage.factory import get_artifact_store
from pdf_forge.utils.sample_io import format_sample

# Initialize logging
setup_logging(
    level=settings.log_level,
    log_file=settings.log_file
)

logger = get_logger(__name__)

DESK_CALIBRATION_SIZES = [2 ** 8, 2 ** 10, 2 ** 12, 2 ** 14, 2 ** 16]


def create_app() -> FastAPI:
    app = FastAPI(
        title=settings.app_name,
        version=__version__,
        debug=settings.debug,
    )

    # CORS middleware
    app.add_middleware(
        CORSMiddleware,
        allow_origins=settings.allowed_origins,
        allow_credentials=True,
        allow_methods=["GET", "POST", "OPTIONS"],
        allow_headers=["*"],
    )

    # Include API routes
    app.include_router(api_router, prefix=settings.api_prefix)

    @app.get("/health")
    def health():
        return get_artifact_store().health_check()

    return app


app = create_app()


def _parse_params(pairs: Optional[List[str]]) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ValueError(f"--param expects KEY=VALUE, got {pair!r}")
        try:
            params[key] = float(value)
        except ValueError:
            params[key] = value
    return params


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdf-forge", description="Nonparametric maximum-entropy density estimation"
    )
    parser.add_argument("--log-level", default=None, help="Override the configured log level")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="Estimate the pdf of a sample file")
    fit.add_argument("--input", required=True, help="Sample file: one value per line or a CSV column")
    fit.add_argument("--out", default="./fit-output", help="Output directory (default: ./fit-output)")
    fit.add_argument("--seed", type=int, default=settings.default_seed)
    fit.add_argument("--min", type=float, default=None, dest="lower", help="Explicit lower window bound")
    fit.add_argument("--max", type=float, default=None, dest="upper", help="Explicit upper window bound")
    fit.add_argument("--symmetric", type=float, default=None, metavar="CENTER", help="Mirror symmetry about CENTER")
    fit.add_argument("--coverage", type=float, default=0.40, help="Target SURD coverage (default: 0.40)")
    fit.add_argument("--solutions", type=int, default=5, help="Ensemble size (default: 5)")
    fit.add_argument("--censor-c", type=float, default=7.0, help="Outlier fence coefficient (default: 7)")
    fit.add_argument("--calibration", default=None, help="Calibration artifact to score against")
    fit.add_argument("--svg", action="store_true", help="Also render pdf.svg and sqr.svg")
    fit.add_argument("--force", action="store_true", help="Overwrite existing artifacts")

    calibrate = sub.add_parser("calibrate", help="Regenerate the SURD scoring calibration")
    calibrate.add_argument("--sizes", type=int, nargs="+", default=DESK_CALIBRATION_SIZES)
    calibrate.add_argument("--trials", type=int, default=settings.calibration_trials)
    calibrate.add_argument("--seed", type=int, default=settings.calibration_seed)
    calibrate.add_argument("--out", default="calibration.json")
    calibrate.add_argument("--no-verify", action="store_true", help="Keep the artifact even if the size-law gates fail")
    calibrate.add_argument("--force", action="store_true")

    sample = sub.add_parser("sample", help="Draw a sample from a test distribution")
    sample.add_argument("--dist", required=True, help="Registered distribution name")
    sample.add_argument("-n", "--count", type=int, required=True)
    sample.add_argument("--seed", type=int, default=settings.default_seed)
    sample.add_argument("--param", action="append", metavar="KEY=VALUE", help="Distribution parameter")
    sample.add_argument("--out", default="-", help="Output file, '-' for stdout")
    sample.add_argument("--force", action="store_true")

    bench = sub.add_parser("bench", help="Fit and score samples from the test distributions")
    bench.add_argument("--dists", nargs="+", default=None)
    bench.add_argument("--sizes", type=int, nargs="+", default=None)
    bench.add_argument("--full", action="store_true", help="Add the large sizes 2^16 and 2^20")
    bench.add_argument("--samples", type=int, default=4, help="Samples per size (default: 4)")
    bench.add_argument("--solutions", type=int, default=5)
    bench.add_argument("--seed", type=int, default=settings.default_seed)
    bench.add_argument("--symmetric", action="store_true", help="Fit symmetric distributions with folding")
    bench.add_argument("--calibration", default=None)
    bench.add_argument("--out", default="./bench-output")
    bench.add_argument("--force", action="store_true")

    sqr = sub.add_parser("sqr", help="Scaled residual quantiles of a stored model against a sample")
    sqr.add_argument("--model", required=True, help="model.json written by fit")
    sqr.add_argument("--input", required=True)
    sqr.add_argument("--out", default="./sqr-output")
    sqr.add_argument("--svg", action="store_true")
    sqr.add_argument("--force", action="store_true")

    serve = sub.add_parser("serve", help="Start the HTTP API")
    serve.add_argument("--port", type=int, default=8000, help="Port to run the server on (default: 8000)")
    serve.add_argument("--workers", type=int, default=1, help="Number of workers (default: 1)")
    serve.add_argument("--reload", action="store_true", help="Reload the server on code changes")
    return parser


def cmd_fit(args: argparse.Namespace) -> int:
    if (args.lower is None) != (args.upper is None):
        raise ValueError("--min and --max must be given together")
    config = RunConfig(
        input_path=args.input,
        output_dir=args.out,
        seed=args.seed,
        target_coverage=args.coverage,
        solutions=args.solutions,
        symmetry_center=args.symmetric,
        bounds=(args.lower, args.upper) if args.lower is not None else None,
        censor_c=args.censor_c,
        emit_svg=args.svg,
        force=args.force,
        calibration_path=args.calibration,
    )
    outcome = fit_service.run(config)
    central = outcome.ensemble.central
    print(
        f"{central.status.value}: {central.model.multipliers_reported} multipliers, "
        f"coverage {central.report.coverage:.3f}; artifacts in {args.out}"
    )
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    if args.trials < MIN_CALIBRATION_TRIALS:
        logger.error(
            f"--trials {args.trials} is too few for stable 1001-level quantiles; "
            f"use at least {MIN_CALIBRATION_TRIALS} (10000 is the default)"
        )
        return EXIT_USAGE
    calibration = calibration_service.regenerate(
        args.sizes, args.trials, args.seed, out_path=args.out, force=args.force, verify=not args.no_verify
    )
    print(
        f"slope {calibration.slope}, intercept {calibration.intercept}, "
        f"40% threshold {calibration.target_L:.4f}, 5% threshold {calibration.floor_L:.4f}; wrote {args.out}"
    )
    return EXIT_OK


def cmd_sample(args: argparse.Namespace) -> int:
    dist = make_distribution(args.dist, **_parse_params(args.param))
    drawn = sample_distribution(dist, args.count, np.random.default_rng(args.seed))
    text = format_sample(drawn.values)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        target = Path(args.out)
        get_artifact_store(str(target.parent), force=args.force).save_text(target.name, text)
        logger.info(f"Wrote {args.count} draws of {args.dist} to {target}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    store = benchmark_service.prepare_output(args.out, force=args.force)
    sizes = list(args.sizes or DESK_SIZES)
    if args.full:
        sizes += [n for n in FULL_SIZES if n not in sizes]
    rows = benchmark_service.run_benchmark(
        dists=args.dists,
        sizes=sizes,
        samples_per_size=args.samples,
        solutions_per_sample=args.solutions,
        seed=args.seed,
        calibration=calibration_service.get_calibration(args.calibration),
        use_symmetry=args.symmetric,
    )
    benchmark_service.write(rows, store)
    failed = sum(row.status in ("error", "incomplete") for row in rows)
    print(f"{len(rows)} rows ({failed} failed fits) written to {args.out}")
    return EXIT_OK


def cmd_sqr(args: argparse.Namespace) -> int:
    series = fit_service.recompute_sqr(args.model, args.input, args.out, force=args.force, emit_svg=args.svg)
    print(f"{series.mu.size} points, max |delta| = {series.max_abs:.4f}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run(
        "pdf_forge.main:app",
        host="0.0.0.0",
        port=args.port,
        workers=args.workers,
        reload=args.reload,
    )
    return EXIT_OK


COMMANDS = {
    "fit": cmd_fit,
    "calibrate": cmd_calibrate,
    "sample": cmd_sample,
    "bench": cmd_bench,
    "sqr": cmd_sqr,
    "serve": cmd_serve,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and map failures onto the exit-code taxonomy"""
    args = build_parser().parse_args(argv)
    if args.log_level:
        setup_logging(level=args.log_level, log_file=settings.log_file)
    try:
        return COMMANDS[args.command](args)
    except PdfForgeError as e:
        logger.error(f"{args.command} failed: {e}")
        return e.exit_code
    except (ValueError, ValidationError) as e:
        logger.error(f"{args.command}: invalid arguments: {e}")
        return EXIT_USAGE


def run():
    """Entry point for the pdf-forge command"""
    sys.exit(main())


if __name__ == "__main__":
    run()
