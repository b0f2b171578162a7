"""
Heralding response schemas.
"""

from typing import Optional

from pydantic import BaseModel, Field


class FeasibilityResult(BaseModel):
    """Q/(2n̄_b+1) against 2πN."""

    passed: bool
    margin: float
    threshold: float


class HeraldReport(BaseModel):
    """Heralding probabilities and timing for one configuration."""

    label: Optional[str] = None
    steps: int
    herald_probability: float = Field(..., description="P_N as printed (canonical)")
    operator_trace_probability: float = Field(..., description="P_N from the operator-product trace")
    probability_ratio: float = Field(..., description="operator trace / printed")
    expected_ratio: float = Field(..., description="Documented value of the ratio")
    relax_time: float = Field(..., description="T_r in seconds")
    total_time: float = Field(..., description="T_tot in seconds")
    per_step_thermal: Optional[float] = None
    feasibility: Optional[FeasibilityResult] = None
    coherent_total_time: Optional[float] = Field(
        None, description="T_tot for coherent input at the optimal amplitude"
    )
    coherent_time_ratio: Optional[float] = Field(
        None, description="coherent T_tot / single-photon T_tot"
    )
