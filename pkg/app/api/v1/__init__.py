"""
API v1 routes.
"""

from fastapi import APIRouter

from .base_routes import router as base_router
from .heralding_routes import router as heralding_router
from .pulse_routes import router as pulse_router
from .state_routes import router as states_router
from .table_routes import router as table_router

# Main API router for version 1
api_router = APIRouter(
    prefix="/api/v1"
)

api_router.include_router(base_router)
api_router.include_router(states_router)
api_router.include_router(heralding_router)
api_router.include_router(pulse_router)
api_router.include_router(table_router)
