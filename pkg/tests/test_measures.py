"""
Non-classicality and macroscopicity measure tests.
"""

from unittest.mock import MagicMock

import numpy as np
import pytest

from domain.entities.phase_space import PhaseSpaceState
from domain.models.exceptions import UnnormalizedStateError
from domain.models.requests.protocol import PhaseOrdering, ProtocolConfig
from domain.services.measure_service import Regime


@pytest.mark.parametrize("occupation", [0.0, 0.5, 2.0])
def test_thermal_state_measures(measure_service, occupation):
    state = PhaseSpaceState.thermal(occupation)
    s = 1 + 2 * occupation
    report = measure_service.report(state)
    assert report.delta == pytest.approx(0.0, abs=1e-9)
    assert report.min_w >= 0.0
    assert report.macroscopicity == pytest.approx(1 / s, rel=1e-6)
    assert report.lee_jeong == pytest.approx(-(s - 1) / (2 * s**2), abs=1e-8)


def test_odd_cat_minimum_is_parity_bound(measure_service, protocol_service):
    for separation in (1.0, 2.0, 4.0):
        cat = protocol_service.build_scs(1, separation, 0.0)
        value, (x, p) = measure_service.min_wigner(cat)
        assert value == pytest.approx(-1 / np.pi, abs=1e-8)
        assert p == pytest.approx(separation / 2, abs=1e-4)


@pytest.mark.parametrize("separation,expected", [(2.0, 4.164), (4.0, 9.149)])
def test_odd_cat_macroscopicity(measure_service, protocol_service, separation, expected):
    cat = protocol_service.build_scs(2, separation / 2, 0.0)
    value, angle = measure_service.macroscopicity(cat)
    overlap = np.exp(-(separation**2) / 4)
    # pure odd cat: the X quadrature saturates 4 Var(P)
    exact = (1 + separation**2 / 2 - overlap) / (1 - overlap)
    assert value == pytest.approx(exact, rel=1e-6)
    assert value == pytest.approx(expected, abs=1e-3)
    assert 0 <= angle < np.pi
    assert min(angle, np.pi - angle) < 1e-3


def test_odd_cat_negative_volume(measure_service, protocol_service):
    cat = protocol_service.build_scs(4, 1.0, 0.0)
    assert measure_service.negative_volume(cat) == pytest.approx(0.2462, abs=1e-4)


def test_lee_jeong_forms_agree(measure_service, protocol_service):
    cat = protocol_service.build_scs(3, 1.0, 0.1)
    report = measure_service.report(cat)
    assert report.lee_jeong == pytest.approx(report.lee_jeong_gradient_form, abs=1e-8)
    assert report.errors["lee_jeong"] < 1e-6


def test_lee_jeong_of_pure_cat(measure_service, protocol_service):
    d = 3.0
    overlap = np.exp(-(d**2) / 4)
    var_x = (0.5 - overlap * (0.5 - d**2 / 4)) / (1 - overlap)
    var_p = (1 + d**2 / 2 - overlap) / (2 * (1 - overlap))
    # pure states: (Var X + Var P - 1)/2
    expected = 0.5 * (var_x + var_p - 1)
    assert measure_service.lee_jeong(protocol_service.build_scs(1, d, 0.0)) == pytest.approx(expected, rel=1e-8)


def test_cfi_of_vacuum_is_isotropic(measure_service):
    vacuum = PhaseSpaceState.thermal(0.0)
    for angle in (0.0, 0.4, -1.2):
        assert measure_service.cfi_quadrature(vacuum, angle) == pytest.approx(2.0, rel=1e-8)


@pytest.mark.parametrize("separation,occupation", [(10.0, 0.0), (16.0, 0.5)])
def test_delta_series_in_validity_range(measure_service, protocol_service, separation, occupation):
    cat = protocol_service.build_scs(1, separation, occupation)
    series = measure_service.scs_delta_series(1, separation, occupation)
    assert series == pytest.approx(measure_service.negative_volume(cat), abs=1e-4)


def test_regime_classification(measure_service):
    assert measure_service.regime_classify(1, 0.5) is Regime.FOCK_LIKE
    assert measure_service.regime_classify(2, 1.0) is Regime.KITTEN
    assert measure_service.regime_classify(3, 1.0) is Regime.CAT
    assert measure_service.regime_classify(3, 1.0, initial_occupation=1.0) is Regime.KITTEN


def test_measures_require_normalized_state(measure_service):
    state = PhaseSpaceState.thermal(0.0).scaled(2.0)
    with pytest.raises(UnnormalizedStateError):
        measure_service.report(state)
    with pytest.raises(UnnormalizedStateError):
        measure_service.negative_volume(state)


def test_report_row_flattens_inputs(measure_service, protocol_service):
    cat = protocol_service.build_scs(3, 1.0, 0.0)
    report = measure_service.report(cat, {"steps": 3, "coupling": 1.0})
    row = report.as_row()
    assert row["steps"] == 3
    assert row["min_w"] == report.min_w
    assert "err_delta" in row
    assert -1 / np.pi - 1e-6 <= report.min_w < 0
    assert 0 < report.delta < 1 / np.pi


@pytest.mark.parametrize("separation,warned", [(4.0, True), (6.0, True), (10.0, False)])
def test_delta_series_warns_near_its_limit(measure_service, separation, warned):
    measure_service.logger = MagicMock()
    value = measure_service.scs_delta_series(1, separation, 0.0)
    assert measure_service.logger.warning.called is warned
    if not warned:
        assert value <= 1 / np.pi


@pytest.mark.parametrize("shift", [0.5, 1.0, 2.0])
def test_measures_ignore_rigid_translations(measure_service, protocol_service, shift):
    cat = protocol_service.build_scs(3, 1.0, 0.1)
    before = measure_service.report(cat)
    after = measure_service.report(cat.shifted(dp=shift))
    assert after.min_w == pytest.approx(before.min_w, abs=1e-8)
    assert after.delta == pytest.approx(before.delta, abs=1e-5)
    assert after.lee_jeong == pytest.approx(before.lee_jeong, abs=1e-6)
    assert after.macroscopicity == pytest.approx(before.macroscopicity, rel=1e-5)


def test_decoherence_never_adds_negativity(measure_service, protocol_service):
    reports = []
    for n_th in (0.0, 1e-5, 1e-3, 1e-2):
        config = ProtocolConfig(steps=3, coupling=1.0, per_step_thermal=n_th, ordering=PhaseOrdering.ZERO_FIRST)
        reports.append(measure_service.report(protocol_service.run_sequence(config)[0]))
    for cleaner, noisier in zip(reports, reports[1:]):
        assert noisier.delta <= cleaner.delta + 1e-6
        assert noisier.min_w >= cleaner.min_w - 1e-9


@pytest.mark.parametrize("steps", [5, 6, 7])
def test_minimum_saturates_without_decoherence(measure_service, protocol_service, steps):
    config = ProtocolConfig(steps=steps, coupling=1.0, ordering=PhaseOrdering.ZERO_FIRST)
    value, _ = measure_service.min_wigner(protocol_service.run_sequence(config)[0])
    assert value == pytest.approx(-1 / np.pi, abs=2e-3)
    assert value >= -1 / np.pi - 1e-9
