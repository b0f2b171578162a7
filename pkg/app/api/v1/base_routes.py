"""
Service information endpoints.
"""
from fastapi import APIRouter

from core.config import settings
from core.constants import constants_metadata

router = APIRouter()


@router.get("/")
async def root():
    """Root endpoint."""
    return {"message": f"Welcome to the {settings.app_name}!", "version": settings.app_version}


@router.get("/health")
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy"}


@router.get("/constants")
async def physical_constants():
    """ħ and k_B as written into artifact metadata."""
    return constants_metadata()
