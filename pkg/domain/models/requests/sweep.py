"""
Sweep and grid request schemas.
"""

from typing import List, Optional

from pydantic import BaseModel, Field, field_validator

from domain.models.requests.protocol import CatBranch, PhaseOrdering


class SweepRequest(BaseModel):
    """Cartesian sweep over step number, coupling, decoherence and occupation."""

    steps: List[int] = Field(default_factory=lambda: list(range(8)), description="Step numbers N")
    couplings: List[float] = Field(default_factory=lambda: [0.1, 1.0], description="Couplings μ")
    per_step_thermal: List[float] = Field(
        default_factory=lambda: [1e-5, 1e-3, 1e-2], description="Phonons per step n̄_th"
    )
    initial_occupations: List[float] = Field(
        default_factory=lambda: [0.0, 0.1, 1.0], description="Initial occupations n̄"
    )
    branch: CatBranch = Field(CatBranch.CLICK01, description="Cat schedule preset")
    ordering: PhaseOrdering = Field(PhaseOrdering.ZERO_FIRST, description="Cat phase ordering")
    plots: bool = Field(True, description="Render line plots per (μ, measure)")

    @field_validator("steps")
    def validate_steps(cls, v):
        if not v or any(n < 0 for n in v):
            raise ValueError("steps must be a nonempty list of nonnegative integers")
        return sorted(set(v))

    @field_validator("couplings")
    def validate_couplings(cls, v):
        if not v or any(mu <= 0 for mu in v):
            raise ValueError("couplings must be positive")
        return v

    @field_validator("per_step_thermal", "initial_occupations")
    def validate_nonnegative(cls, v):
        if not v or any(x < 0 for x in v):
            raise ValueError("values must be nonnegative")
        return v


class GridRequest(BaseModel):
    """Explicit grid override; bounds default to the state's own extent."""

    nx: int = Field(..., ge=2, le=8193)
    np_: int = Field(..., ge=2, le=8193, alias="np")
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    p_min: Optional[float] = None
    p_max: Optional[float] = None

    model_config = {"populate_by_name": True}
