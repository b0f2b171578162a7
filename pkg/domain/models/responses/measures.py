"""
Measure response schemas.
"""

import math
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, Field


class MeasureReport(BaseModel):
    """Non-classicality and macroscopicity measures of one state."""

    min_w: float = Field(..., ge=-1 / math.pi - 1e-6, description="Minimum of W")
    min_w_location: Tuple[float, float] = Field(..., description="(X, P) of the minimum")
    delta: float = Field(..., ge=0, lt=1 / math.pi + 1e-6, description="Negative volume δ")
    lee_jeong: float = Field(..., description="Lee–Jeong measure 𝓘 (Laplacian form)")
    lee_jeong_gradient_form: float = Field(..., description="𝓘 from the gradient form")
    macroscopicity: float = Field(..., description="𝓜 = max_λ F_λ / 2")
    optimal_lambda: float = Field(..., description="Optimal quadrature angle in [0, π)")
    errors: Dict[str, float] = Field(default_factory=dict, description="Numerical error estimates")
    herald_probability: Optional[float] = Field(None, description="P_N when known")
    total_time: Optional[float] = Field(None, description="T_tot in seconds when known")
    inputs: Dict[str, object] = Field(default_factory=dict, description="Echo of the inputs")

    def as_row(self) -> Dict[str, object]:
        """Flat row for CSV export."""
        row: Dict[str, object] = dict(self.inputs)
        row.update(
            min_w=self.min_w,
            min_w_x=self.min_w_location[0],
            min_w_p=self.min_w_location[1],
            delta=self.delta,
            lee_jeong=self.lee_jeong,
            lee_jeong_gradient_form=self.lee_jeong_gradient_form,
            macroscopicity=self.macroscopicity,
            optimal_lambda=self.optimal_lambda,
        )
        for name, value in sorted(self.errors.items()):
            row[f"err_{name}"] = value
        if self.herald_probability is not None:
            row["herald_probability"] = self.herald_probability
        if self.total_time is not None:
            row["total_time"] = self.total_time
        return row
