from fastapi import APIRouter, HTTPException, status

from pdf_forge.core.exceptions import PdfForgeError
from pdf_forge.core.logging import get_logger
from pdf_forge.models.api import EnsembleSummary, FitRequest, FitResponse
from pdf_forge.models.report import RunConfig
from pdf_forge.models.sample import RawSample
from pdf_forge.services.calibration_service import calibration_service
from pdf_forge.services.fit_service import fit_service

router = APIRouter()
logger = get_logger(__name__)


@router.post("/", response_model=FitResponse)
def fit_values(request: FitRequest):
    """Fit posted values; returns the central model, ensemble summary, diagnostics and the pdf on 1001 points"""
    try:
        config = RunConfig(
            seed=request.seed,
            target_coverage=request.coverage,
            solutions=request.solutions,
            symmetry_center=request.symmetric_center,
            bounds=request.bounds,
            censor_c=request.censor_c,
        )
        outcome = fit_service.fit_sample(RawSample(values=request.values), config)
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))
    except PdfForgeError as e:
        logger.warning(f"Fit rejected: {e}")
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    except Exception as e:
        logger.error(f"Fit failed: {str(e)}", exc_info=True)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Fit failed: {str(e)}"
        )

    ensemble = outcome.ensemble
    if ensemble is None:
        return FitResponse(complete=False, message=outcome.message)

    pdf = fit_service.pdf_frame(ensemble)
    return FitResponse(
        complete=outcome.complete,
        message=outcome.message,
        model=fit_service.model_record(ensemble, config, calibration_service.get_calibration().version),
        ensemble=EnsembleSummary(
            solutions=len(ensemble.attempts),
            central_index=ensemble.central_index,
            rejected=len(ensemble.rejected),
            level_sizes=ensemble.level_sizes,
            statuses=[a.status.value for a in ensemble.attempts],
            coverages=[a.report.coverage for a in ensemble.attempts],
        ),
        diagnostics=outcome.diagnostics.model_dump(mode="json") if outcome.diagnostics else None,
        pdf={column: pdf[column].tolist() for column in pdf.columns},
    )
