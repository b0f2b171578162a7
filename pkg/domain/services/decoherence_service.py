"""
Service layer for thermal decoherence between protocol steps.
"""

import time
from typing import Optional, Tuple

import numpy as np

from core.config import settings
from core.constants import HBAR, K_B
from core.logging import get_logger, log_service_operation
from domain.entities.phase_space import PhaseSpaceState
from domain.models.exceptions import ConfigValidationError
from domain.models.requests.device import DeviceParams, ThermalEnvironment
from domain.models.requests.protocol import ProtocolConfig
from domain.models.responses.heralding import FeasibilityResult
from domain.services.phase_space_service import PhaseSpaceService, merge
from domain.utils.operator_algebra import descriptors_for


def apply_thermal_channel(state: PhaseSpaceState, added: float) -> PhaseSpaceState:
    """Convolve every term with an isotropic Gaussian adding ``added`` phonons."""
    if added == 0 or len(state) == 0:
        return state
    s_new = state.s + 2 * added
    ratio = state.s / s_new
    kx_new = state.kx * ratio
    kp_new = state.kp * ratio
    phase = np.exp(1j * ((state.kx - kx_new) * state.x0 + (state.kp - kp_new) * state.p0))
    damping = np.exp(-(state.kx**2 + state.kp**2) * state.s * added / (2 * s_new))
    return state.replace(
        weights=state.weights * ratio * phase * damping,
        s=s_new,
        kx=kx_new,
        kp=kp_new,
        normalized=state.normalized,
    )


class DecoherenceService:
    """Service class for the thermal channel and bath estimates."""

    def __init__(self, phase_space_service: PhaseSpaceService):
        self.phase_space_service = phase_space_service
        self.logger = get_logger(__name__)

    def thermal_channel(self, state: PhaseSpaceState, per_step_thermal: float) -> PhaseSpaceState:
        """
        Apply the Gaussian-displacement average adding n̄_th phonons.

        Args:
            state: Input state
            per_step_thermal: Phonons added n̄_th

        Returns:
            State with s → s + 2n̄_th and damped, recentred fringes; trace unchanged

        Raises:
            ConfigValidationError: if n̄_th is negative
        """
        if per_step_thermal < 0:
            raise ConfigValidationError("per_step_thermal", "must be nonnegative")
        return apply_thermal_channel(state, per_step_thermal)

    def decohered_protocol_state(self, config: ProtocolConfig) -> PhaseSpaceState:
        """
        Build the decohered protocol state directly from its closed form.

        Every branch of exponent pairs (l_j, m_j) contributes one term with
        ξ_i = Σ_{j≤i}(l_j - m_j)μ and the common width S = 1 + 2n̄ + 2Nn̄_th.
        One channel follows each of the N steps.

        Args:
            config: Protocol configuration

        Returns:
            Normalized state
        """
        start_time = time.time()

        try:
            descriptors = descriptors_for(config)
            mu = config.coupling
            n_th = config.per_step_thermal
            width = 1 + 2 * config.initial_occupation + 2 * config.steps * n_th

            # branch state: ξ_i, Σξ_i, Σξ_i², momentum shift
            coef = np.array([1.0 + 0j])
            xi = np.zeros(1)
            xi_sum = np.zeros(1)
            xi_sq = np.zeros(1)
            shift = np.zeros(1)

            for descriptor in descriptors:
                exponents = descriptor.exponents
                c = descriptor.coefficients[exponents]
                left, right = np.meshgrid(exponents, exponents, indexing="ij")
                pair = np.outer(c, c.conj()).reshape(-1)
                d = ((left - right) * mu).reshape(-1)
                p = ((left + right) * mu / 2).reshape(-1)

                coef = (coef[:, None] * pair[None, :]).reshape(-1)
                xi = (xi[:, None] + d[None, :]).reshape(-1)
                xi_sum = np.repeat(xi_sum, d.size) + xi
                xi_sq = np.repeat(xi_sq, d.size) + xi**2
                shift = (shift[:, None] + p[None, :]).reshape(-1)

                keys = np.round(np.stack([xi, xi_sum, xi_sq, shift], axis=1) / settings.merge_key_tolerance)
                _, first, inverse = np.unique(keys.astype(np.int64), axis=0, return_index=True, return_inverse=True)
                summed = np.zeros(first.size, dtype=complex)
                np.add.at(summed, inverse.reshape(-1), coef)
                coef, xi, xi_sum, xi_sq, shift = summed, xi[first], xi_sum[first], xi_sq[first], shift[first]

            a = n_th * xi_sum
            weights = coef / (np.pi * width) * np.exp(-0.5 * n_th * xi_sq + a**2 / width)
            state = PhaseSpaceState(
                weights=weights,
                x0=np.zeros_like(xi),
                p0=shift,
                s=np.full_like(xi, width),
                kx=xi - 2 * a / width,
                kp=np.zeros_like(xi),
            )
            state = merge(state, settings.merge_key_tolerance, settings.merge_drop_relative)
            state = self.phase_space_service.normalize(state)

            duration = time.time() - start_time
            log_service_operation(
                logger=self.logger,
                service="DecoherenceService",
                operation="decohered_protocol_state",
                duration=duration,
                steps=config.steps,
                per_step_thermal=n_th,
                terms=len(state),
            )
            return state

        except Exception as e:
            duration = time.time() - start_time
            self.logger.error(
                "Service operation failed",
                service="DecoherenceService",
                operation="decohered_protocol_state",
                error=str(e),
                duration_ms=round(duration * 1000, 2),
                exc_info=True,
            )
            raise

    def bath_occupancy(self, temperature: float, mech_frequency: float) -> float:
        """
        Bose-Einstein occupation 1/(exp(ħω/k_B T) - 1).

        Args:
            temperature: Bath temperature in kelvin
            mech_frequency: ω in rad/s
        """
        if temperature <= 0 or mech_frequency <= 0:
            raise ConfigValidationError("bath_temperature", "temperature and frequency must be positive")
        return float(1.0 / np.expm1(HBAR * mech_frequency / (K_B * temperature)))

    def phonons_per_period(self, env: ThermalEnvironment) -> float:
        """n̄_th = π(2n̄_b + 1)/Q."""
        return float(np.pi * (2 * env.bath_occupation + 1) / env.quality_factor)

    def feasibility_check(self, env: ThermalEnvironment, steps: int) -> FeasibilityResult:
        """Margin Q/(2n̄_b+1) / (2πN); passes at the configured threshold."""
        if steps < 1:
            raise ConfigValidationError("steps", "feasibility needs N ≥ 1")
        margin = env.quality_factor / (2 * env.bath_occupation + 1) / (2 * np.pi * steps)
        threshold = settings.feasibility_threshold
        return FeasibilityResult(passed=bool(margin >= threshold), margin=float(margin), threshold=threshold)

    def environment_for(self, device: DeviceParams) -> Optional[ThermalEnvironment]:
        """Bath description of a device, or None when only n̄_th is given."""
        if device.bath_occupation is not None:
            occupation = device.bath_occupation
        elif device.bath_temperature is not None:
            occupation = self.bath_occupancy(device.bath_temperature, device.mech_frequency)
        else:
            return None
        return ThermalEnvironment(
            bath_occupation=occupation,
            quality_factor=device.quality_factor,
            mech_frequency=device.mech_frequency,
        )

    def per_step_thermal_for(self, device: DeviceParams) -> Tuple[float, Optional[ThermalEnvironment]]:
        """n̄_th of a device: the explicit value when given, else from its bath."""
        env = self.environment_for(device)
        if device.per_step_thermal is not None:
            return device.per_step_thermal, env
        return self.phonons_per_period(env), env
