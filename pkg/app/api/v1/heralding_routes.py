"""
Heralding and timing endpoints.
"""

from fastapi import APIRouter, Depends, Query

from app.api.v1.errors import as_http_error
from domain.models.exceptions import SimulationError
from domain.models.requests.heralding import HeraldRequest
from domain.models.responses.heralding import HeraldReport
from domain.services.deps import get_experiment_service, get_heralding_service
from domain.services.experiment_service import ExperimentService
from domain.services.heralding_service import HeraldingService, SchemeKind

router = APIRouter(prefix="/heralding", tags=["Heralding"])


@router.post("", response_model=HeraldReport)
def herald(
    request: HeraldRequest,
    experiment_service: ExperimentService = Depends(get_experiment_service),
    service: HeraldingService = Depends(get_heralding_service),
) -> HeraldReport:
    """Heralding probabilities, total time and feasibility of a device."""
    try:
        config = request.config or experiment_service.protocol_config_for(request.device)
        return service.herald_report(config, request.device, request.timing)
    except SimulationError as e:
        raise as_http_error(e)


@router.get("/scaling")
def scaling(
    kind: SchemeKind = Query(..., description="Heralding scheme"),
    steps: int = Query(..., ge=1, le=64, description="Steps N or multiport size"),
    service: HeraldingService = Depends(get_heralding_service),
):
    """Optimal-amplitude scaling prefactor of a heralding scheme."""
    return {"kind": kind.value, "steps": steps, "scaling": service.scheme_scaling(kind, steps)}
