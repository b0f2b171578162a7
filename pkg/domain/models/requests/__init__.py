"""
Request schemas for run configuration and API input validation.
"""

from .device import DeviceParams, ThermalEnvironment, TimingParams
from .heralding import HeraldRequest
from .loss import LossModel
from .protocol import CatBranch, InputKind, PhaseOrdering, ProtocolConfig
from .pulse import CavityParams, EnvelopeKind, EnvelopeSpec
from .sweep import GridRequest, SweepRequest
from .table import Table1Entry, Table1Spec

__all__ = [
    # Protocol
    "CatBranch",
    "InputKind",
    "PhaseOrdering",
    "ProtocolConfig",
    "LossModel",
    # Devices
    "DeviceParams",
    "ThermalEnvironment",
    "TimingParams",
    "HeraldRequest",
    "CavityParams",
    "EnvelopeKind",
    "EnvelopeSpec",
    # Experiments
    "GridRequest",
    "SweepRequest",
    "Table1Entry",
    "Table1Spec",
]
