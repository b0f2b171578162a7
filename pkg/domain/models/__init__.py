from .exceptions import (
    ArtifactIOError,
    ConfigValidationError,
    SimulationError,
    ToleranceError,
)

__all__ = [
    "ArtifactIOError",
    "ConfigValidationError",
    "SimulationError",
    "ToleranceError",
]
