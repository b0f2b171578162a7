"""
Table parameter-set endpoints.
"""

from fastapi import APIRouter, Depends

from app.api.v1.errors import as_http_error
from domain.models.exceptions import SimulationError
from domain.models.requests.table import Table1Spec
from domain.repositories.parameter_repository import ParameterRepository
from domain.services.deps import get_parameter_repository

router = APIRouter(prefix="/table1", tags=["Table"])


@router.get("/expected", response_model=Table1Spec)
def expected_rows(repository: ParameterRepository = Depends(get_parameter_repository)) -> Table1Spec:
    """The embedded parameter sets and expected values; nothing is computed."""
    try:
        return repository.load_table1()
    except SimulationError as e:
        raise as_http_error(e)
