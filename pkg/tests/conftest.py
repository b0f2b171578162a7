"""
Pytest configuration and fixtures for testing.
"""

import pytest
from unittest.mock import MagicMock
from click.testing import CliRunner
from httpx import AsyncClient, ASGITransport

from app.main import app
from domain.entities.phase_space import PhaseSpaceState
from domain.models.requests.device import DeviceParams
from domain.models.requests.protocol import PhaseOrdering, ProtocolConfig
from domain.models.responses.heralding import HeraldReport
from domain.models.responses.measures import MeasureReport
from domain.models.responses.pulse import PulseCouplingResponse
from domain.services.decoherence_service import DecoherenceService
from domain.services.deps import (
    build_experiment_service,
    get_experiment_service,
    get_heralding_service,
    get_pulse_service,
)
from domain.services.experiment_service import StateRun
from domain.services.fock_oracle_service import FockOracleService
from domain.services.heralding_service import HeraldingService
from domain.services.loss_service import LossService
from domain.services.measure_service import MeasureService
from domain.services.phase_space_service import PhaseSpaceService
from domain.services.protocol_service import ProtocolService
from domain.services.pulse_service import PulseService

# Configure pytest to use asyncio as the default async backend
pytest_plugins = ("pytest_asyncio",)


@pytest.fixture
def anyio_backend():
    return "asyncio"


@pytest.fixture
def phase_space_service():
    return PhaseSpaceService()


@pytest.fixture
def decoherence_service(phase_space_service):
    return DecoherenceService(phase_space_service)


@pytest.fixture
def protocol_service(phase_space_service, decoherence_service):
    return ProtocolService(phase_space_service, decoherence_service)


@pytest.fixture
def measure_service(phase_space_service):
    return MeasureService(phase_space_service)


@pytest.fixture
def heralding_service(decoherence_service):
    return HeraldingService(decoherence_service)


@pytest.fixture
def loss_service(protocol_service, heralding_service):
    return LossService(protocol_service, heralding_service)


@pytest.fixture
def pulse_service():
    return PulseService()


@pytest.fixture
def fock_oracle_service():
    return FockOracleService()


@pytest.fixture
def experiment_service():
    return build_experiment_service()


@pytest.fixture
def small_config():
    """Three single-photon steps at μ = 1 from the ground state."""
    return ProtocolConfig(steps=3, coupling=1.0, ordering=PhaseOrdering.ZERO_FIRST)


@pytest.fixture
def device():
    """A 1 MHz, 100 mK device with the coupling given directly."""
    return DeviceParams(
        label="test_device",
        coupling=1.0,
        mech_frequency_hz=1.0e6,
        quality_factor=6.28e6,
        bath_temperature=0.1,
        initial_occupation=0.1,
        efficiency=0.9,
        steps=3,
        ordering=PhaseOrdering.ZERO_FIRST,
    )


@pytest.fixture
def cli_runner():
    return CliRunner()


@pytest.fixture
def measure_report():
    return MeasureReport(
        min_w=-0.23,
        min_w_location=(0.0, 1.5),
        delta=0.165,
        lee_jeong=0.886,
        lee_jeong_gradient_form=0.886,
        macroscopicity=4.39,
        optimal_lambda=0.0,
        errors={"delta": 1e-6},
    )


@pytest.fixture
def mock_experiment_service(measure_report):
    """Create a mock experiment service."""
    service = MagicMock()
    service.run_state.return_value = StateRun(
        config=ProtocolConfig(steps=1, coupling=1.0),
        states=[PhaseSpaceState.thermal(0.0)],
        weights=[1.0],
    )
    service.measure.return_value = measure_report
    service.protocol_config_for.return_value = ProtocolConfig(steps=3, coupling=1.0)
    return service


@pytest.fixture
def mock_heralding_service():
    """Create a mock heralding service."""
    service = MagicMock()
    service.herald_report.return_value = HeraldReport(
        label="test_device",
        steps=3,
        herald_probability=0.17,
        operator_trace_probability=0.021,
        probability_ratio=0.125,
        expected_ratio=0.125,
        relax_time=3.18e-4,
        total_time=5.9,
    )
    service.scheme_scaling.return_value = 0.25
    return service


@pytest.fixture
def mock_pulse_service():
    """Create a mock pulse service."""
    service = MagicMock()
    service.coupling_from_pulse.return_value = PulseCouplingResponse(
        coupling=2.1213,
        coupling_per_g0_over_kappa=2.1213,
        envelope="matched",
        relative_error=1e-12,
    )
    return service


@pytest.fixture
async def async_client():
    """Create async test client with the real services."""
    async with AsyncClient(
        transport=ASGITransport(app=app), base_url="http://test"
    ) as test_client:
        yield test_client


@pytest.fixture
async def async_state_client(mock_experiment_service):
    """Create async test client with a mocked experiment service."""
    app.dependency_overrides[get_experiment_service] = lambda: mock_experiment_service
    async with AsyncClient(
        transport=ASGITransport(app=app), base_url="http://test"
    ) as c:
        yield c
    app.dependency_overrides.clear()


@pytest.fixture
async def async_heralding_client(mock_experiment_service, mock_heralding_service):
    """Create async test client with mocked experiment and heralding services."""
    app.dependency_overrides[get_experiment_service] = lambda: mock_experiment_service
    app.dependency_overrides[get_heralding_service] = lambda: mock_heralding_service
    async with AsyncClient(
        transport=ASGITransport(app=app), base_url="http://test"
    ) as c:
        yield c
    app.dependency_overrides.clear()


@pytest.fixture
async def async_pulse_client(mock_pulse_service):
    """Create async test client with a mocked pulse service."""
    app.dependency_overrides[get_pulse_service] = lambda: mock_pulse_service
    async with AsyncClient(
        transport=ASGITransport(app=app), base_url="http://test"
    ) as c:
        yield c
    app.dependency_overrides.clear()
