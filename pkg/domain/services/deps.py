"""
Service dependency injection utilities.
"""

from fastapi import Depends

from domain.repositories.parameter_repository import ParameterRepository
from domain.services.decoherence_service import DecoherenceService
from domain.services.experiment_service import ExperimentService
from domain.services.fock_oracle_service import FockOracleService
from domain.services.heralding_service import HeraldingService
from domain.services.loss_service import LossService
from domain.services.measure_service import MeasureService
from domain.services.phase_space_service import PhaseSpaceService
from domain.services.protocol_service import ProtocolService
from domain.services.pulse_service import PulseService


def get_parameter_repository() -> ParameterRepository:
    return ParameterRepository()


def get_phase_space_service() -> PhaseSpaceService:
    return PhaseSpaceService()


def get_decoherence_service(
    phase_space_service: PhaseSpaceService = Depends(get_phase_space_service),
) -> DecoherenceService:
    return DecoherenceService(phase_space_service)


def get_protocol_service(
    phase_space_service: PhaseSpaceService = Depends(get_phase_space_service),
    decoherence_service: DecoherenceService = Depends(get_decoherence_service),
) -> ProtocolService:
    return ProtocolService(phase_space_service, decoherence_service)


def get_measure_service(
    phase_space_service: PhaseSpaceService = Depends(get_phase_space_service),
) -> MeasureService:
    """Dependency to get MeasureService instance."""
    return MeasureService(phase_space_service)


def get_heralding_service(
    decoherence_service: DecoherenceService = Depends(get_decoherence_service),
) -> HeraldingService:
    """Dependency to get HeraldingService instance."""
    return HeraldingService(decoherence_service)


def get_pulse_service() -> PulseService:
    """Dependency to get PulseService instance."""
    return PulseService()


def build_experiment_service() -> ExperimentService:
    """Wire every service by hand, for callers outside FastAPI."""
    phase_space_service = PhaseSpaceService()
    decoherence_service = DecoherenceService(phase_space_service)
    protocol_service = ProtocolService(phase_space_service, decoherence_service)
    heralding_service = HeraldingService(decoherence_service)
    return ExperimentService(
        phase_space_service=phase_space_service,
        protocol_service=protocol_service,
        decoherence_service=decoherence_service,
        measure_service=MeasureService(phase_space_service),
        heralding_service=heralding_service,
        loss_service=LossService(protocol_service, heralding_service),
        pulse_service=PulseService(),
        fock_oracle_service=FockOracleService(),
    )


def get_experiment_service() -> ExperimentService:
    """Dependency to get ExperimentService instance."""
    return build_experiment_service()
