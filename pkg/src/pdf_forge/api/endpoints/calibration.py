from fastapi import APIRouter, HTTPException, status

from pdf_forge.core.exceptions import PdfForgeError
from pdf_forge.core.logging import get_logger
from pdf_forge.models.api import CalibrationResponse
from pdf_forge.services.calibration_service import calibration_service

router = APIRouter()
logger = get_logger(__name__)


@router.get("/", response_model=CalibrationResponse)
def get_calibration():
    """Decision thresholds and provenance of the active scoring calibration"""
    try:
        calibration = calibration_service.get_calibration()
    except PdfForgeError as e:
        logger.error(f"Calibration unavailable: {e}")
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e))
    return CalibrationResponse(**calibration_service.summary(calibration))
