"""
Service layer for simulation operations.
"""

from .decoherence_service import DecoherenceService
from .experiment_service import ExperimentService
from .fock_oracle_service import FockOracleService
from .heralding_service import HeraldingService
from .loss_service import LossService
from .measure_service import MeasureService
from .phase_space_service import PhaseSpaceService
from .protocol_service import ProtocolService
from .pulse_service import PulseService

__all__ = [
    "DecoherenceService",
    "ExperimentService",
    "FockOracleService",
    "HeraldingService",
    "LossService",
    "MeasureService",
    "PhaseSpaceService",
    "ProtocolService",
    "PulseService",
]
