"""
Pulse response schemas.
"""

from pydantic import BaseModel, Field


class PulseCouplingResponse(BaseModel):
    """Coupling μ computed from a pulse envelope."""

    coupling: float = Field(..., description="Dimensionless coupling μ")
    coupling_per_g0_over_kappa: float = Field(..., description="μ / (g₀/κ)")
    envelope: str
    relative_error: float = Field(..., description="Change on the last refinement")
