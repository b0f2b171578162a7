"""
Optical loss tests.
"""

import numpy as np
import pytest

from domain.entities.operators import Phase
from domain.entities.phase_space import Grid
from domain.models.exceptions import ConfigValidationError
from domain.models.requests.loss import LossModel
from domain.models.requests.protocol import InputKind, PhaseOrdering, ProtocolConfig


@pytest.fixture
def coherent_config():
    return ProtocolConfig(
        steps=3,
        coupling=1.0,
        input_kind=InputKind.COHERENT,
        alpha=np.sqrt(0.1),
        efficiency=0.75,
        ordering=PhaseOrdering.ZERO_FIRST,
    )


@pytest.fixture
def loss():
    return LossModel(efficiency=0.75, alpha=np.sqrt(0.1))


def test_effective_operator_rescales_amplitude(loss_service):
    op = loss_service.effective_coherent_operator(0.64, 1.0, (1, 0), Phase.of_turns(0), 1.0)
    alpha = 0.8
    assert np.allclose(op.coefficients, np.exp(-(alpha**2)) * alpha / np.sqrt(2) * np.array([1.0, 1.0]))


def test_mixture_weights_follow_poisson(loss_service, coherent_config, loss):
    weights = loss_service.loss_mixture_weights(coherent_config, loss)
    mean = loss_service.lost_photon_mean(coherent_config, loss)
    assert mean == pytest.approx(3 * 0.25 * 0.1)
    assert weights.sum() == pytest.approx(1.0)
    assert weights[1] / weights[0] == pytest.approx(mean)
    assert weights[2] / weights[1] == pytest.approx(mean / 2)


def test_direct_product_sum_groups_to_poisson(loss_service, coherent_config, loss):
    direct = loss_service.direct_mixture_weights(coherent_config, loss, per_step_max=4)
    mean = loss_service.lost_photon_mean(coherent_config, loss)
    assert direct[1] / direct[0] == pytest.approx(mean)
    assert direct[3] / direct[2] == pytest.approx(mean / 3)


def test_lossless_mixture_is_single_component(loss_service, coherent_config):
    lossless = coherent_config.model_copy(update={"efficiency": 1.0})
    assert np.array_equal(loss_service.loss_mixture_weights(lossless, LossModel()), [1.0])


def test_mixture_state_is_normalized(loss_service, phase_space_service, coherent_config, loss):
    state = loss_service.loss_mixture_state(coherent_config, loss)
    assert state.normalized
    assert phase_space_service.integral(state) == pytest.approx(1.0, abs=1e-10)
    assert state.p0.max() > 3.0


def test_mixture_keeps_macroscopicity_and_dilutes_negativity(
    loss_service, protocol_service, measure_service, coherent_config, loss
):
    base, _ = protocol_service.run_sequence(coherent_config)
    mixed = loss_service.loss_mixture_state(coherent_config, loss, base=base)
    before = measure_service.report(base)
    after = measure_service.report(mixed)
    # P shifts leave the X marginal alone
    assert after.macroscopicity == pytest.approx(before.macroscopicity, rel=1e-4)
    assert after.min_w >= before.min_w - 1e-9
    assert after.delta <= before.delta + 1e-6


def test_mixture_rejects_single_photon_model(loss_service, coherent_config):
    with pytest.raises(ConfigValidationError):
        loss_service.loss_mixture_state(
            coherent_config, LossModel(efficiency=0.5, input_kind=InputKind.SINGLE_PHOTON)
        )


def test_single_photon_loss_effect(loss_service):
    assert loss_service.single_photon_loss_effect(0.8) == 0.8
    with pytest.raises(ConfigValidationError):
        loss_service.single_photon_loss_effect(1.2)


def test_lossy_herald_probability(loss_service, heralding_service, coherent_config, loss):
    lossless_form = heralding_service.coherent_probability(3, 1.0, 0.0, 0.75, np.sqrt(0.1))
    mean = loss_service.lost_photon_mean(coherent_config, loss)
    assert loss_service.lossy_herald_probability(coherent_config, loss) == pytest.approx(
        lossless_form * np.exp(mean), rel=1e-9
    )
    ideal = coherent_config.model_copy(update={"efficiency": 1.0})
    assert loss_service.lossy_herald_probability(ideal, LossModel()) == pytest.approx(
        heralding_service.coherent_probability(3, 1.0, 0.0, 1.0, np.sqrt(0.1))
    )


def test_lossy_step_matches_mixture_in_fock_basis(
    fock_oracle_service, loss_service, phase_space_service, coherent_config, loss
):
    config = coherent_config.model_copy(update={"steps": 1})
    rho, _ = fock_oracle_service.run_sequence_fock(config)
    mixed = loss_service.loss_mixture_state(config, loss)
    grid = Grid(-2.0, 2.0, -1.0, 3.0, 9, 11)
    assert np.allclose(
        fock_oracle_service.wigner_of(rho, grid), phase_space_service.evaluate(mixed, grid), atol=1e-7
    )


def test_unset_fields_come_from_the_run(loss_service, coherent_config):
    resolved = loss_service.resolve(coherent_config, LossModel())
    assert resolved.efficiency == 0.75
    assert resolved.alpha == pytest.approx(np.sqrt(0.1))
    assert loss_service.lost_photon_mean(coherent_config, LossModel()) == pytest.approx(3 * 0.25 * 0.1)


@pytest.mark.parametrize(
    "fields",
    [{"efficiency": 0.5}, {"alpha": 0.3}, {"efficiency": 0.75, "alpha": 1 / np.sqrt(2)}],
)
def test_disagreeing_loss_model_is_rejected(loss_service, coherent_config, fields):
    loss = LossModel(**fields)
    with pytest.raises(ConfigValidationError):
        loss_service.resolve(coherent_config, loss)
    with pytest.raises(ConfigValidationError):
        loss_service.loss_mixture_weights(coherent_config, loss)
    with pytest.raises(ConfigValidationError):
        loss_service.lossy_herald_probability(coherent_config, loss)
