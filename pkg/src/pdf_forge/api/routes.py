from fastapi import APIRouter
from pdf_forge.api.endpoints import distributions, fit, calibration

router = APIRouter()

router.include_router(distributions.router, prefix="/distributions", tags=["distributions"])
router.include_router(fit.router, prefix="/fit", tags=["fit"])
router.include_router(calibration.router, prefix="/calibration", tags=["calibration"])
