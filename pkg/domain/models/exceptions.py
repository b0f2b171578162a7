"""
Domain exceptions raised by the simulation services.
"""


class SimulationError(Exception):
    """Base exception for simulation errors."""


class ConfigValidationError(SimulationError):
    """Raised when a run configuration is inconsistent."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NormalizationError(SimulationError):
    """Raised when a state's total integral is zero or not real."""


class ZeroTraceError(NormalizationError):
    """Raised when a click sequence cancels the state completely."""


class UnnormalizedStateError(SimulationError):
    """Raised when an operation needs a normalized state."""


class HermiticityError(SimulationError):
    """Raised when an evaluated Wigner function or a density matrix is not Hermitian."""


class NonPhysicalStateError(SimulationError):
    """Raised when a density matrix has a significant negative eigenvalue."""


class TruncationLeakageError(SimulationError):
    """Raised when Fock-basis truncation leaks population."""


class QuadratureConvergenceError(SimulationError):
    """Raised when a refined quadrature does not settle within its budget."""


class PulseIntegrationError(SimulationError):
    """Raised when the pulse envelope is not normalized or the integral diverges."""


class ToleranceError(SimulationError):
    """Raised when computed values fall outside their expected tolerance."""


class ArtifactIOError(SimulationError):
    """Raised when reading or writing artifacts fails."""
