"""
State measure endpoints.
"""

from fastapi import APIRouter, Depends

from app.api.v1.errors import as_http_error
from domain.models.exceptions import SimulationError
from domain.models.requests.protocol import ProtocolConfig
from domain.models.responses.measures import MeasureReport
from domain.services.deps import get_experiment_service
from domain.services.experiment_service import ExperimentService

router = APIRouter(prefix="/states", tags=["States"])


@router.post("/measures", response_model=MeasureReport)
def state_measures(
    config: ProtocolConfig,
    service: ExperimentService = Depends(get_experiment_service),
) -> MeasureReport:
    """Run the protocol and evaluate the four measures of the final state."""
    try:
        run = service.run_state(config)
        return service.measure(run.final, config)
    except SimulationError as e:
        raise as_http_error(e)
