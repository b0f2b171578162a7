"""
Heralding request schema.
"""

from typing import Optional

from pydantic import BaseModel, Field

from domain.models.requests.device import DeviceParams, TimingParams
from domain.models.requests.protocol import ProtocolConfig


class HeraldRequest(BaseModel):
    """Device plus an optional explicit protocol; without one the device's own protocol is used."""

    device: DeviceParams
    config: Optional[ProtocolConfig] = None
    timing: TimingParams = Field(default_factory=TimingParams)
