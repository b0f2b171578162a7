"""
Phase-space term algebra tests.
"""

import numpy as np
import pytest

from domain.entities.phase_space import Grid, PhaseSpaceState, WignerTerm
from domain.models.exceptions import (
    ConfigValidationError,
    UnnormalizedStateError,
    ZeroTraceError,
)
from domain.services.phase_space_service import bounding_box, field_at_points


def test_thermal_state_is_normalized(phase_space_service):
    for occupation in (0.0, 0.1, 2.5):
        state = PhaseSpaceState.thermal(occupation)
        assert state.normalized
        assert phase_space_service.integral(state) == pytest.approx(1.0, abs=1e-14)


def test_vacuum_peak_value(phase_space_service):
    state = PhaseSpaceState.thermal(0.0)
    grid = Grid(-1.0, 1.0, -1.0, 1.0, 3, 3)
    field = phase_space_service.evaluate(state, grid)
    assert field.shape == (3, 3)
    assert field[1, 1] == pytest.approx(1 / np.pi)
    assert field[2, 1] == pytest.approx(np.exp(-1.0) / np.pi)


def test_term_integral_closed_form(phase_space_service):
    term = WignerTerm(weight=0.3, center=(0.5, -1.0), s=2.0, wavevector=(1.5, 0.0))
    expected = 0.3 * np.pi * 2.0 * np.exp(1j * 0.75) * np.exp(-(1.5**2) * 2.0 / 4)
    assert phase_space_service.term_integral(term) == pytest.approx(expected)


def test_term_integral_matches_grid_sum(phase_space_service):
    term = WignerTerm(weight=1.0, center=(0.0, 0.0), s=1.0, wavevector=(2.0, 0.0))
    state = PhaseSpaceState.from_terms([term])
    grid = Grid(-8.0, 8.0, -8.0, 8.0, 801, 801)
    field = np.real(phase_space_service.evaluate(state + state.replace(kx=-state.kx), grid))
    numeric = np.trapezoid(np.trapezoid(field, grid.p, axis=1), grid.x)
    assert numeric == pytest.approx(2 * phase_space_service.term_integral(term).real, rel=1e-6)


def test_shift_preserves_integral(phase_space_service):
    state = PhaseSpaceState(
        weights=[0.5, 0.25],
        x0=[0.0, 0.1],
        p0=[0.0, 1.0],
        s=[1.0, 1.5],
        kx=[0.0, 2.0],
        kp=[0.0, 0.5],
    )
    shifted = state.shifted(dx=0.3, dp=-1.2)
    assert phase_space_service.integral(shifted) == pytest.approx(phase_space_service.integral(state))
    assert np.allclose(shifted.p0, state.p0 - 1.2)


def test_states_are_immutable():
    state = PhaseSpaceState.thermal(0.0)
    with pytest.raises(ValueError):
        state.weights[0] = 2.0


def test_replace_drops_normalization_flag():
    state = PhaseSpaceState.thermal(0.0)
    assert not state.scaled(2.0).normalized
    assert state.shifted(dp=1.0).normalized
    assert not (state + state).normalized


def test_invalid_terms_are_rejected():
    with pytest.raises(ConfigValidationError):
        WignerTerm(weight=1.0, center=(0.0, 0.0), s=0.0)
    with pytest.raises(ConfigValidationError):
        WignerTerm(weight=1.0, center=(np.nan, 0.0), s=1.0)
    with pytest.raises(ConfigValidationError):
        PhaseSpaceState([1.0], [0.0], [0.0], [1.0, 2.0], [0.0], [0.0])
    with pytest.raises(ConfigValidationError):
        PhaseSpaceState.thermal(-0.1)


def test_grid_validation():
    with pytest.raises(ConfigValidationError):
        Grid(0.0, 1.0, 0.0, 1.0, 1, 5)
    with pytest.raises(ConfigValidationError):
        Grid(1.0, 0.0, 0.0, 1.0, 5, 5)
    grid = Grid(-1.0, 1.0, -2.0, 2.0, 5, 9)
    assert grid.dx == pytest.approx(0.5)
    assert grid.dp == pytest.approx(0.5)
    assert grid.refined().nx == 9
    assert grid.to_dict()["np"] == 9


def test_normalize_rescales_weights(phase_space_service):
    state = PhaseSpaceState.thermal(0.3).scaled(4.0)
    normalized = phase_space_service.normalize(state)
    assert normalized.normalized
    assert phase_space_service.integral(normalized) == pytest.approx(1.0)


def test_normalize_rejects_cancelled_state(phase_space_service):
    vacuum = PhaseSpaceState.thermal(0.0)
    with pytest.raises(ZeroTraceError):
        phase_space_service.normalize(vacuum + vacuum.scaled(-1.0))
    with pytest.raises(ZeroTraceError):
        phase_space_service.normalize(PhaseSpaceState.empty())


def test_merge_combines_identical_terms(phase_space_service):
    vacuum = PhaseSpaceState.thermal(0.0).replace()
    merged = phase_space_service.merge_terms(vacuum + vacuum + vacuum)
    assert len(merged) == 1
    assert merged.weights[0] == pytest.approx(3 / np.pi)


def test_merge_drops_cancelled_terms(phase_space_service):
    vacuum = PhaseSpaceState.thermal(0.0).replace()
    other = vacuum.shifted(dp=2.0)
    merged = phase_space_service.merge_terms(vacuum + other + vacuum.scaled(-1.0))
    assert len(merged) == 1
    assert merged.p0[0] == pytest.approx(2.0)


def test_marginal_of_vacuum(phase_space_service):
    marginal = phase_space_service.marginal(PhaseSpaceState.thermal(0.0), 0.7)
    u = np.array([0.0, 1.0])
    assert marginal.total() == pytest.approx(1.0)
    assert np.allclose(marginal.density(u), np.exp(-(u**2)) / np.sqrt(np.pi))


def test_marginal_requires_normalized_state(phase_space_service):
    with pytest.raises(UnnormalizedStateError):
        phase_space_service.marginal(PhaseSpaceState.thermal(0.0).scaled(2.0), 0.0)


def test_one_sided_displacement_keeps_trace_for_equal_kicks(phase_space_service):
    state = PhaseSpaceState.thermal(0.2)
    kicked = phase_space_service.one_sided_displacement(state, 1.3, 1.3)
    assert phase_space_service.integral(kicked) == pytest.approx(1.0)


def test_field_at_points_matches_grid(phase_space_service, protocol_service, small_config):
    state, _ = protocol_service.run_sequence(small_config)
    grid = Grid(-2.0, 2.0, -1.0, 4.0, 11, 13)
    field = phase_space_service.evaluate(state, grid)
    row = np.real(field_at_points(state, grid.x, grid.p[4]))
    assert np.allclose(row, field[:, 4])


def test_default_grid_covers_state(phase_space_service, protocol_service, small_config):
    state, _ = protocol_service.run_sequence(small_config)
    grid = phase_space_service.default_grid(state)
    x_min, x_max, p_min, p_max = bounding_box(state, 6.0)
    assert grid.p_min <= 0.0 and grid.p_max >= 3.0
    assert (grid.x_min, grid.x_max, grid.p_min, grid.p_max) == (x_min, x_max, p_min, p_max)
    assert phase_space_service.default_grid(state, 33, 45).nx == 33
