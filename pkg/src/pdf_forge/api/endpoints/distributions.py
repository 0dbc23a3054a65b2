import numpy as np

from fastapi import APIRouter, HTTPException, status
from typing import List

from pdf_forge.components.registry import DistributionFactory, make_distribution, sample_distribution
from pdf_forge.core.exceptions import UnknownDistributionError
from pdf_forge.core.logging import get_logger
from pdf_forge.models.api import DistributionInfo, SampleRequest, SampleResponse

router = APIRouter()
logger = get_logger(__name__)


@router.get("/", response_model=List[DistributionInfo])
def list_distributions():
    """List the registered test distributions"""
    return [DistributionInfo(**make_distribution(name).describe()) for name in DistributionFactory.names()]


@router.post("/{name}/sample", response_model=SampleResponse)
def sample(name: str, request: SampleRequest):
    """Draw an inverse-transform sample from a named distribution"""
    try:
        dist = make_distribution(name, **request.params)
    except UnknownDistributionError as e:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(e))
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))

    drawn = sample_distribution(dist, request.n, np.random.default_rng(request.seed))
    logger.info(f"Sampled {request.n} values from {name} with seed {request.seed}")
    return SampleResponse(distribution=name, seed=request.seed, values=drawn.values.tolist())
