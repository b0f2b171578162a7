"""
Measurement operator and click-sequence tests.
"""

from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from domain.entities.operators import OperatorDescriptor, Phase
from domain.models.exceptions import ConfigValidationError
from domain.models.requests.protocol import CatBranch, InputKind, PhaseOrdering, ProtocolConfig
from domain.services.protocol_service import CatParity
from domain.utils.operator_algebra import cat_phases, compose, descriptor_for


def test_phase_parsing():
    assert Phase.parse("1/4").unit() == 1j
    assert Phase.parse("5/4").turns == Fraction(1, 4)
    assert Phase.parse(np.pi).radians == pytest.approx(np.pi)
    assert Phase.of_turns(1, 2).shifted_half_turn().turns == 0
    with pytest.raises(ConfigValidationError):
        Phase.parse("one half")


def test_single_photon_descriptors():
    phase = Phase.of_turns(1, 4)
    click10 = descriptor_for(1.0, InputKind.SINGLE_PHOTON, (1, 0), phase)
    click01 = descriptor_for(1.0, InputKind.SINGLE_PHOTON, (0, 1), phase)
    assert np.allclose(click10.coefficients, [0.5j, 0.5])
    assert np.allclose(click01.coefficients, [-0.5j, 0.5])
    with pytest.raises(ConfigValidationError):
        descriptor_for(1.0, InputKind.SINGLE_PHOTON, (1, 1), phase)


def test_coherent_descriptor_expands_binomials():
    alpha = 0.8
    op = descriptor_for(1.0, InputKind.COHERENT, (1, 1), Phase.of_turns(0), alpha)
    prefactor = np.exp(-(alpha**2)) * (alpha / np.sqrt(2)) ** 2
    # (z + 1)(z - 1) = z² - 1
    assert np.allclose(op.coefficients, prefactor * np.array([-1.0, 0.0, 1.0]))
    assert list(op.exponents) == [0, 2]


def test_coherent_vacuum_outcome_is_scalar():
    op = descriptor_for(1.0, InputKind.COHERENT, (0, 0), Phase.of_turns(0), 0.5)
    assert len(op) == 1
    assert op.coefficients[0] == pytest.approx(np.exp(-0.25))


def test_descriptor_composition_convolves():
    a = OperatorDescriptor(np.array([1.0, 1.0]), 1.0)
    b = OperatorDescriptor(np.array([1.0, -1.0]), 1.0)
    assert np.allclose((a @ b).coefficients, [1.0, 0.0, -1.0])
    with pytest.raises(ConfigValidationError):
        a @ OperatorDescriptor(np.array([1.0]), 2.0)
    with pytest.raises(ConfigValidationError):
        OperatorDescriptor(np.zeros(3), 1.0)


def test_cat_schedule_orderings():
    formula = cat_phases(3, CatBranch.CLICK01, PhaseOrdering.FORMULA)
    zero_first = cat_phases(3, CatBranch.CLICK01, PhaseOrdering.ZERO_FIRST)
    shifted = cat_phases(3, CatBranch.CLICK10, PhaseOrdering.FORMULA)
    assert [p.turns for p in formula] == [Fraction(1, 3), Fraction(2, 3), Fraction(0)]
    assert [p.turns for p in zero_first] == [Fraction(0), Fraction(1, 3), Fraction(2, 3)]
    assert [p.turns for p in shifted] == [Fraction(5, 6), Fraction(1, 6), Fraction(1, 2)]


@pytest.mark.parametrize("steps", [1, 2, 3, 5, 8])
def test_cat_schedule_composes_to_two_components(steps):
    ops = [
        descriptor_for(1.0, InputKind.SINGLE_PHOTON, (0, 1), phase)
        for phase in cat_phases(steps, CatBranch.CLICK01)
    ]
    product = compose(ops)
    coefficients = product.coefficients
    assert len(coefficients) == steps + 1
    assert np.abs(coefficients[1:-1]).max(initial=0.0) < 1e-12
    assert abs(product.coefficients[0]) == pytest.approx(2.0**-steps)


def test_parity_classes(protocol_service):
    assert protocol_service.parity_class(3, 1.0, (1, 0), CatBranch.CLICK01) is CatParity.EVEN_CAT
    assert protocol_service.parity_class(2, 1.0, (1, 0), CatBranch.CLICK01) is CatParity.ODD_CAT
    assert protocol_service.parity_class(3, 1.0, (0, 1), CatBranch.CLICK01) is CatParity.ODD_CAT
    with pytest.raises(ConfigValidationError):
        protocol_service.parity_class(3, 0.0)


def test_config_validation():
    with pytest.raises(ValidationError):
        ProtocolConfig(steps=2, coupling=1.0, phases=[0.0])
    with pytest.raises(ValidationError):
        ProtocolConfig(steps=1, coupling=1.0, click_sequence=[(1, 1)])
    with pytest.raises(ValidationError):
        ProtocolConfig(steps=0, coupling=1.0)
    with pytest.raises(ValidationError):
        ProtocolConfig(steps=1, coupling=-1.0)
    config = ProtocolConfig(steps=1, coupling=1.0, input_kind="coherent", click_sequence=[(2, 0)])
    assert config.outcomes() == [(2, 0)]


def test_measurement_operator_step_range(protocol_service, small_config):
    assert len(protocol_service.measurement_operator(small_config, 1)) == 2
    with pytest.raises(ConfigValidationError):
        protocol_service.measurement_operator(small_config, 4)


def test_run_sequence_builds_cat(protocol_service, phase_space_service, small_config):
    state, weight = protocol_service.run_sequence(small_config)
    assert state.normalized
    assert phase_space_service.integral(state) == pytest.approx(1.0, abs=1e-12)
    assert sorted(set(np.round(state.p0, 9))) == [0.0, 1.5, 3.0]
    # Tr[MρM†] with M = (z³ - 1)/8
    assert weight == pytest.approx(2.0**-5 * (1 - np.exp(-9 / 4)))


def test_run_sequence_matches_ideal_cat(protocol_service, phase_space_service):
    config = ProtocolConfig(steps=4, coupling=0.75, initial_occupation=0.2, ordering=PhaseOrdering.ZERO_FIRST)
    state, _ = protocol_service.run_sequence(config)
    ideal = protocol_service.build_scs(4, 0.75, 0.2)
    grid = phase_space_service.default_grid(ideal, 41, 61)
    assert np.allclose(phase_space_service.evaluate(state, grid), phase_space_service.evaluate(ideal, grid), atol=1e-10)


def test_sequence_states_track_each_step(protocol_service, small_config):
    states, weights = protocol_service.sequence_states(small_config)
    assert len(states) == 4
    assert weights[0] == 1.0
    assert all(a >= b for a, b in zip(weights, weights[1:]))


def test_single_photon_efficiency_scales_weight_only(protocol_service, phase_space_service, small_config):
    lossy = small_config.model_copy(update={"efficiency": 0.5})
    ideal_state, ideal_weight = protocol_service.run_sequence(small_config)
    lossy_state, lossy_weight = protocol_service.run_sequence(lossy)
    assert lossy_weight == pytest.approx(ideal_weight * 0.5**3)
    assert np.allclose(lossy_state.weights, ideal_state.weights)


def test_coherent_outcomes(protocol_service):
    config = ProtocolConfig(steps=1, coupling=1.0, input_kind="coherent", alpha=0.0, click_sequence=[(0, 0)])
    _, weight = protocol_service.run_sequence(config)
    assert weight == pytest.approx(1.0)
    dark = config.model_copy(update={"click_sequence": [(1, 0)]})
    with pytest.raises(ConfigValidationError):
        protocol_service.run_sequence(dark)


@pytest.mark.parametrize("permutation", [(1, 0, 2), (2, 1, 0), (1, 2, 0)])
def test_step_order_does_not_matter_without_decoherence(protocol_service, phase_space_service, permutation):
    phases = ["0", "1/3", 2.5]
    clicks = [(0, 1), (1, 0), (0, 1)]
    reference = ProtocolConfig(steps=3, coupling=1.0, phases=phases, click_sequence=clicks)
    permuted = reference.model_copy(
        update={"phases": [phases[i] for i in permutation], "click_sequence": [clicks[i] for i in permutation]}
    )
    state, weight = protocol_service.run_sequence(reference)
    swapped, swapped_weight = protocol_service.run_sequence(permuted)
    grid = phase_space_service.default_grid(state, 41, 61)
    assert np.abs(phase_space_service.evaluate(state, grid) - phase_space_service.evaluate(swapped, grid)).max() < 1e-12
    assert swapped_weight == pytest.approx(weight, rel=1e-12)
