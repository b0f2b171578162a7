"""
Heralding probability and experiment-time tests.
"""

import numpy as np
import pytest

from domain.models.exceptions import ConfigValidationError
from domain.models.requests.device import DeviceParams, TimingParams
from domain.models.requests.protocol import InputKind, PhaseOrdering, ProtocolConfig
from domain.services.heralding_service import SchemeKind, relax_time, run_time, visibility_factor


def test_photon_probability(heralding_service):
    value = heralding_service.photon_probability(1, 1.0, 0.0, 1.0)
    assert value == pytest.approx(1 - np.exp(-0.25))
    lossy = heralding_service.photon_probability(3, 1.0, 0.1, 0.9)
    assert lossy == pytest.approx(0.25 * 0.9**3 * (1 - np.exp(-9 * 1.2 / 4)))


def test_coherent_probability(heralding_service):
    alpha = 1 / np.sqrt(2)
    value = heralding_service.coherent_probability(2, 1.0, 0.0, 1.0, alpha)
    assert value == pytest.approx(0.5 * np.exp(-2) * 0.25 * (1 - np.exp(-1.0)))


@pytest.mark.parametrize("steps", [1, 2, 3, 5])
def test_operator_trace_ratio_single_photon(heralding_service, steps):
    config = ProtocolConfig(steps=steps, coupling=0.8, initial_occupation=0.1, efficiency=0.9)
    ratio = heralding_service.operator_trace_probability(config) / heralding_service.herald_probability(config)
    assert ratio == pytest.approx(2.0**-steps, rel=1e-10)
    assert ratio == pytest.approx(heralding_service.expected_probability_ratio(config))


@pytest.mark.parametrize("steps", [1, 2, 4])
def test_operator_trace_ratio_coherent(heralding_service, steps):
    config = ProtocolConfig(
        steps=steps, coupling=1.2, input_kind=InputKind.COHERENT, alpha=0.9, efficiency=0.8
    )
    ratio = heralding_service.operator_trace_probability(config) / heralding_service.herald_probability(config)
    assert ratio == pytest.approx(1.0, rel=1e-10)


def test_operator_trace_matches_run_weight(heralding_service, protocol_service):
    config = ProtocolConfig(steps=3, coupling=1.0, initial_occupation=0.2, ordering=PhaseOrdering.ZERO_FIRST)
    _, weight = protocol_service.run_sequence(config)
    assert heralding_service.operator_trace_probability(config) == pytest.approx(weight, rel=1e-10)


def test_visibility_and_relax_time():
    assert visibility_factor(2, 1.0, 0.0) == pytest.approx(1 - np.exp(-1))
    omega = 2 * np.pi * 1e6
    assert relax_time(omega, 6.28e6) == pytest.approx(1e-3)
    assert relax_time(omega, 100.0) == pytest.approx(100 / omega)


def test_run_time_requires_positive_probability():
    with pytest.raises(ConfigValidationError):
        run_time(0.0, 3, 1.0, 1.0, 1000)
    omega = 2 * np.pi * 1e6
    assert run_time(0.5, 3, omega, 6.28e6, 1000) == pytest.approx(1000 * (3e-6 + 1e-3) / 0.5)


def test_total_time_for_proposed_device(heralding_service, experiment_service, device):
    config = experiment_service.protocol_config_for(device)
    assert heralding_service.total_time(config, device, TimingParams(runs=1000)) == pytest.approx(5.90, rel=0.015)


def test_coherent_comparison_scales_with_efficiency(heralding_service, experiment_service, device):
    config = experiment_service.protocol_config_for(device)
    report = heralding_service.herald_report(config, device)
    assert report.coherent_time_ratio == pytest.approx((2 * np.e * 0.9) ** 3, rel=1e-10)
    assert report.probability_ratio == pytest.approx(report.expected_ratio)
    assert report.feasibility.passed
    assert report.per_step_thermal == pytest.approx(2.0846e-3, rel=2e-3)


def test_optimal_coherent_amplitude(heralding_service):
    efficiency = 0.7
    best = heralding_service.optimal_coherent_amplitude(efficiency)
    values = [
        heralding_service.coherent_probability(3, 1.0, 0.0, efficiency, best * scale)
        for scale in (0.95, 1.0, 1.05)
    ]
    assert values[1] > values[0] and values[1] > values[2]


def test_scheme_scaling(heralding_service):
    assert heralding_service.scheme_scaling(SchemeKind.PHOTON_MULTISTEP, 3) == pytest.approx(0.25)
    assert heralding_service.scheme_scaling(SchemeKind.COHERENT_MULTISTEP, 1) == pytest.approx(0.5 / np.e)
    assert heralding_service.scheme_scaling("noon_multiport", 2) == pytest.approx(0.5 * np.exp(-2))
    with pytest.raises(ConfigValidationError):
        heralding_service.scheme_scaling(SchemeKind.PHOTON_MULTISTEP, 0)


def test_noon_probability(heralding_service):
    alpha, mu = 0.8, 1.0
    value = heralding_service.noon_probability(1, alpha, mu, 0.0, 0.0)
    assert value == pytest.approx(2 * np.exp(-2 * alpha**2) * alpha**2 * (1 + np.exp(-0.25)))
    dark = heralding_service.noon_probability(2, alpha, mu, 0.0, 0.0)
    assert dark == pytest.approx(2 * 0.25 * np.exp(-2 * alpha**2) * alpha**4 * (1 - np.exp(-1.0)))
    with pytest.raises(ConfigValidationError):
        heralding_service.noon_probability(0, alpha, mu, 0.0, 0.0)


def test_device_requires_single_coupling_source():
    with pytest.raises(ValueError):
        DeviceParams(label="x", mech_frequency_hz=1e6, quality_factor=1e6, per_step_thermal=0.0, steps=1)
    with pytest.raises(ValueError):
        DeviceParams(
            label="x", coupling=1.0, g0=1.0, kappa=2.0, mech_frequency_hz=1e6, quality_factor=1e6,
            per_step_thermal=0.0, steps=1,
        )
    with pytest.raises(ValueError):
        DeviceParams(label="x", coupling=1.0, mech_frequency_hz=1e6, quality_factor=1e6, steps=1)


@pytest.mark.parametrize("steps", [1, 3, 6])
def test_photon_probability_grows_with_coupling_and_efficiency(heralding_service, steps):
    by_coupling = [heralding_service.photon_probability(steps, mu, 0.1, 0.9) for mu in (0.05, 0.2, 0.5, 1.0)]
    by_efficiency = [heralding_service.photon_probability(steps, 0.5, 0.1, eta) for eta in (0.2, 0.5, 0.8, 1.0)]
    assert all(a < b for a, b in zip(by_coupling, by_coupling[1:]))
    assert all(a < b for a, b in zip(by_efficiency, by_efficiency[1:]))
