"""
Thermal channel and bath estimate tests.
"""

import numpy as np
import pytest

from domain.entities.phase_space import Grid, PhaseSpaceState
from domain.models.exceptions import ConfigValidationError
from domain.models.requests.device import DeviceParams, ThermalEnvironment
from domain.models.requests.protocol import PhaseOrdering, ProtocolConfig


def test_channel_on_vacuum_gives_thermal_state(decoherence_service, phase_space_service):
    heated = decoherence_service.thermal_channel(PhaseSpaceState.thermal(0.0), 0.25)
    expected = PhaseSpaceState.thermal(0.25)
    assert np.allclose(heated.s, expected.s)
    assert np.allclose(heated.weights, expected.weights)
    assert phase_space_service.integral(heated) == pytest.approx(1.0)


def test_channel_preserves_trace_and_damps_fringes(decoherence_service, phase_space_service, protocol_service):
    cat = protocol_service.build_scs(3, 1.0, 0.0)
    heated = decoherence_service.thermal_channel(cat, 0.01)
    assert phase_space_service.integral(heated) == pytest.approx(1.0)
    fringe = np.abs(cat.kx) > 0
    assert np.all(np.abs(heated.weights[fringe]) < np.abs(cat.weights[fringe]))


def test_channels_compose_additively(decoherence_service):
    cat = PhaseSpaceState(
        weights=[0.2, 0.1 + 0.05j],
        x0=[0.0, 0.3],
        p0=[0.0, 1.0],
        s=[1.0, 1.4],
        kx=[0.0, 2.0],
        kp=[0.0, -0.5],
    )
    twice = decoherence_service.thermal_channel(decoherence_service.thermal_channel(cat, 0.02), 0.03)
    once = decoherence_service.thermal_channel(cat, 0.05)
    assert np.allclose(twice.weights, once.weights)
    assert np.allclose(twice.kx, once.kx)
    assert np.allclose(twice.s, once.s)


def test_zero_channel_is_identity(decoherence_service):
    state = PhaseSpaceState.thermal(0.3)
    assert decoherence_service.thermal_channel(state, 0.0) is state
    with pytest.raises(ConfigValidationError):
        decoherence_service.thermal_channel(state, -1e-3)


@pytest.mark.parametrize("steps", [1, 2, 3, 5, pytest.param(7, marks=pytest.mark.slow)])
@pytest.mark.parametrize("per_step_thermal", [1e-3, 1e-2])
def test_closed_form_matches_stepwise_run(
    decoherence_service, protocol_service, phase_space_service, steps, per_step_thermal
):
    config = ProtocolConfig(
        steps=steps,
        coupling=1.0,
        initial_occupation=0.1,
        per_step_thermal=per_step_thermal,
        ordering=PhaseOrdering.ZERO_FIRST,
    )
    stepwise, _ = protocol_service.run_sequence(config)
    closed = decoherence_service.decohered_protocol_state(config)
    grid = phase_space_service.default_grid(stepwise, 61, 81)
    assert np.allclose(
        phase_space_service.evaluate(closed, grid),
        phase_space_service.evaluate(stepwise, grid),
        atol=1e-10,
    )


@pytest.mark.parametrize("added", [1e-3, 0.05, 0.4])
def test_channel_raises_second_moments_by_added_phonons(decoherence_service, phase_space_service, added):
    gaussian = PhaseSpaceState(weights=[1.0], x0=[0.3], p0=[-0.7], s=[1.4], kx=[0.0], kp=[0.0])
    grid = Grid(-12.0, 12.0, -12.0, 12.0, 481, 481)
    x, p = np.meshgrid(grid.x, grid.p, indexing="ij")

    def second_moments(state):
        w = phase_space_service.evaluate(state, grid)
        return (x**2 * w).sum() / w.sum(), (p**2 * w).sum() / w.sum()

    x2, p2 = second_moments(gaussian)
    heated_x2, heated_p2 = second_moments(decoherence_service.thermal_channel(gaussian, added))
    assert heated_x2 - x2 == pytest.approx(added, abs=1e-9)
    assert heated_p2 - p2 == pytest.approx(added, abs=1e-9)


def test_bath_occupancy(decoherence_service):
    omega = 2 * np.pi * 1.0e6
    occupation = decoherence_service.bath_occupancy(0.1, omega)
    assert occupation == pytest.approx(2083.6, rel=1e-3)
    with pytest.raises(ConfigValidationError):
        decoherence_service.bath_occupancy(0.0, omega)


@pytest.mark.parametrize(
    "frequency_hz,quality,expected",
    [
        (1.00e6, 6.28e6, 2.0846e-3),
        (4.30e6, 7.54e5, 4.037e-3),
        (3.74e6, 3.74e4, 9.359e-2),
    ],
)
def test_phonons_per_step_from_bath(decoherence_service, frequency_hz, quality, expected):
    device = DeviceParams(
        label="bath",
        coupling=1.0,
        mech_frequency_hz=frequency_hz,
        quality_factor=quality,
        bath_temperature=0.1,
        steps=3,
    )
    n_th, env = decoherence_service.per_step_thermal_for(device)
    assert n_th == pytest.approx(expected, rel=2e-3)
    assert env.quality_factor == quality


def test_explicit_phonons_per_step_win(decoherence_service):
    device = DeviceParams(
        label="atoms", coupling=17.8, mech_frequency_hz=37e3, quality_factor=581, per_step_thermal=5.41e-3, steps=3
    )
    n_th, env = decoherence_service.per_step_thermal_for(device)
    assert n_th == 5.41e-3
    assert env is None


def test_feasibility(decoherence_service):
    good = ThermalEnvironment(bath_occupation=2083.6, quality_factor=6.28e6, mech_frequency=2 * np.pi * 1e6)
    poor = ThermalEnvironment(bath_occupation=557.0, quality_factor=3.74e4, mech_frequency=2 * np.pi * 3.74e6)
    assert decoherence_service.feasibility_check(good, 3).passed
    result = decoherence_service.feasibility_check(poor, 3)
    assert not result.passed
    assert result.margin == pytest.approx(3.74e4 / 1115 / (6 * np.pi))
    with pytest.raises(ConfigValidationError):
        decoherence_service.feasibility_check(good, 0)


def test_environment_rates():
    env = ThermalEnvironment(bath_occupation=1.0, quality_factor=100.0, mech_frequency=200.0)
    assert env.intrinsic_decay == pytest.approx(2.0)
    assert env.decoherence_rate == pytest.approx(6.0)
