"""
Mapping of simulation errors onto HTTP errors.
"""

from fastapi import HTTPException, status

from domain.models.exceptions import SimulationError


def as_http_error(error: SimulationError) -> HTTPException:
    return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(error))
