"""
Repository layer for parameter files and run artifacts.
"""

from .artifact_repository import ArtifactRepository
from .parameter_repository import ParameterRepository

__all__ = [
    "ArtifactRepository",
    "ParameterRepository",
]
