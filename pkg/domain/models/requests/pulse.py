"""
Pulse-shape request schemas.
"""

from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator


class EnvelopeKind(str, Enum):
    MATCHED = "matched"
    SQUARE = "square"
    GAUSSIAN = "gaussian"
    TABLE = "table"


class EnvelopeSpec(BaseModel):
    """Optical pulse envelope f(t).

    ``duration`` (square) and ``width`` (gaussian) are in seconds; table samples are
    (t, Re f, Im f) rows, either inline or loaded from a CSV file.
    """

    kind: EnvelopeKind = Field(EnvelopeKind.MATCHED, description="Envelope family")
    duration: Optional[float] = Field(None, gt=0, description="Square pulse duration (s)")
    width: Optional[float] = Field(None, gt=0, description="Gaussian width (s)")
    center: float = Field(0.0, description="Pulse centre time (s)")
    samples: Optional[List[Tuple[float, float, float]]] = Field(
        None, description="Tabulated (t, Re f, Im f) samples"
    )
    table_path: Optional[str] = Field(None, description="CSV file with t,re[,im] columns")

    @model_validator(mode="after")
    def validate_shape(self):
        if self.kind is EnvelopeKind.SQUARE and self.duration is None:
            raise ValueError("square envelope requires duration")
        if self.kind is EnvelopeKind.GAUSSIAN and self.width is None:
            raise ValueError("gaussian envelope requires width")
        if self.kind is EnvelopeKind.TABLE and self.samples is None and self.table_path is None:
            raise ValueError("table envelope requires samples or table_path")
        return self


class CavityParams(BaseModel):
    """Cavity coupling and pulse envelope."""

    g0: float = Field(..., ge=0, description="Single-photon coupling g₀ (rad/s)")
    kappa: float = Field(..., gt=0, description="Cavity amplitude decay κ (rad/s)")
    envelope: EnvelopeSpec = Field(default_factory=EnvelopeSpec, description="Pulse envelope")
