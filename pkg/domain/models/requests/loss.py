"""
Optical loss request schema.
"""

from typing import Optional

from pydantic import BaseModel, Field

from core.config import settings
from domain.models.requests.protocol import InputKind


class LossModel(BaseModel):
    """
    Beam-splitter loss of transmission η ahead of each detector.

    η and α belong to the protocol run; left unset they are taken from its
    ProtocolConfig, and values that disagree with it are rejected.
    """

    efficiency: Optional[float] = Field(None, ge=0, le=1, description="Transmission η, defaults to the run's")
    input_kind: InputKind = Field(InputKind.COHERENT, description="Optical input state")
    alpha: Optional[complex] = Field(None, description="Coherent amplitude α, defaults to the run's")
    truncation_tail: float = Field(
        default_factory=lambda: settings.loss_tail_epsilon, gt=0, lt=1e-6, description="Poisson tail mass ε"
    )
