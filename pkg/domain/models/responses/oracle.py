"""
Fock-oracle comparison response schemas.
"""

from typing import Dict, List

from pydantic import BaseModel, Field

from domain.models.requests.protocol import InputKind


class OracleCell(BaseModel):
    """Engine against oracle for one configuration."""

    steps: int
    coupling: float
    initial_occupation: float
    per_step_thermal: float
    dimension: int
    wigner_sup_norm: float
    measure_differences: Dict[str, float] = Field(default_factory=dict)
    probability_difference: float
    passed: bool


class LossCheck(BaseModel):
    """Trace distance of a lossy run from its lossless counterpart."""

    input_kind: InputKind
    steps: int
    efficiency: float
    lost_photon_mean: float = Field(..., description="N(1-η)|α|², zero for single photons")
    trace_distance: float
    tolerance: float
    passed: bool


class OracleCheckReport(BaseModel):
    cells: List[OracleCell]
    loss_checks: List[LossCheck] = Field(default_factory=list)
    wigner_tolerance: float
    measure_tolerance: float
    passed: bool
