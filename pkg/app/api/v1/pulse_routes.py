"""
Pulse coupling endpoints.
"""

from fastapi import APIRouter, Depends

from app.api.v1.errors import as_http_error
from domain.models.exceptions import SimulationError
from domain.models.requests.pulse import CavityParams
from domain.models.responses.pulse import PulseCouplingResponse
from domain.services.deps import get_pulse_service
from domain.services.pulse_service import PulseService

router = APIRouter(prefix="/pulse", tags=["Pulse"])


@router.post("/coupling", response_model=PulseCouplingResponse)
def pulse_coupling(
    params: CavityParams,
    service: PulseService = Depends(get_pulse_service),
) -> PulseCouplingResponse:
    """Coupling μ delivered by an envelope with inline samples or an analytic shape."""
    try:
        return service.coupling_from_pulse(params)
    except SimulationError as e:
        raise as_http_error(e)
