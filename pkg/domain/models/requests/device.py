"""
Device, environment and timing request schemas.
"""

import math
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from core.config import settings
from domain.models.requests.protocol import CatBranch, InputKind, PhaseOrdering


class ThermalEnvironment(BaseModel):
    """Mechanical bath: occupation n̄_b, quality factor Q, frequency ω (rad/s)."""

    bath_occupation: float = Field(..., ge=0, description="Bath occupation n̄_b")
    quality_factor: float = Field(..., gt=0, description="Mechanical quality factor Q")
    mech_frequency: float = Field(..., gt=0, description="Mechanical angular frequency ω (rad/s)")

    @property
    def intrinsic_decay(self) -> float:
        """γ = ω/Q."""
        return self.mech_frequency / self.quality_factor

    @property
    def decoherence_rate(self) -> float:
        """Γ = (2n̄_b + 1)γ."""
        return (2 * self.bath_occupation + 1) * self.intrinsic_decay


class DeviceParams(BaseModel):
    """One physical device, as listed in the device table."""

    label: str = Field(..., min_length=1, description="Row label")
    coupling: Optional[float] = Field(None, gt=0, description="Coupling μ, if given directly")
    g0: Optional[float] = Field(None, ge=0, description="Single-photon coupling g₀ (rad/s)")
    kappa: Optional[float] = Field(None, gt=0, description="Cavity decay κ (rad/s)")
    mech_frequency_hz: float = Field(..., gt=0, description="Mechanical frequency ω/2π (Hz)")
    quality_factor: float = Field(..., gt=0, description="Mechanical quality factor Q")
    bath_temperature: Optional[float] = Field(None, gt=0, description="Bath temperature (K)")
    bath_occupation: Optional[float] = Field(
        None, ge=0, description="Bath occupation n̄_b, overrides the temperature"
    )
    per_step_thermal: Optional[float] = Field(
        None, ge=0, description="Phonons added per step n̄_th, overrides the bath"
    )
    initial_occupation: float = Field(0.0, ge=0, description="Initial occupation n̄")
    efficiency: float = Field(1.0, gt=0, le=1, description="Detection efficiency η")
    input_kind: InputKind = Field(InputKind.SINGLE_PHOTON, description="Optical input state")
    steps: int = Field(..., ge=1, le=64, description="Number of steps N")
    branch: CatBranch = Field(CatBranch.CLICK01, description="Cat schedule preset")
    ordering: PhaseOrdering = Field(PhaseOrdering.ZERO_FIRST, description="Cat phase ordering")

    @model_validator(mode="after")
    def validate_coupling_source(self):
        has_pulse = self.g0 is not None or self.kappa is not None
        if (self.coupling is None) == (not has_pulse):
            raise ValueError("exactly one of coupling or (g0, kappa) must be supplied")
        if has_pulse and (self.g0 is None or self.kappa is None):
            raise ValueError("g0 and kappa must be supplied together")
        if self.per_step_thermal is None and self.bath_occupation is None and self.bath_temperature is None:
            raise ValueError("one of per_step_thermal, bath_occupation or bath_temperature is required")
        return self

    @property
    def mech_frequency(self) -> float:
        """ω in rad/s."""
        return 2 * math.pi * self.mech_frequency_hz


class TimingParams(BaseModel):
    """Run-count convention for total-time estimates."""

    runs: int = Field(default_factory=lambda: settings.default_runs, ge=1, description="Successful runs required")
