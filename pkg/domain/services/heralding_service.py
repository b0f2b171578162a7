"""
Service layer for heralding probabilities and experiment-time estimates.
"""

import time
from enum import Enum
from typing import Optional

import numpy as np

from core.logging import get_logger, log_service_operation
from domain.models.exceptions import ConfigValidationError
from domain.models.requests.device import DeviceParams, TimingParams
from domain.models.requests.protocol import InputKind, ProtocolConfig
from domain.models.responses.heralding import HeraldReport
from domain.services.decoherence_service import DecoherenceService
from domain.utils.operator_algebra import compose, descriptors_for


class SchemeKind(str, Enum):
    COHERENT_MULTISTEP = "coherent_multistep"
    PHOTON_MULTISTEP = "photon_multistep"
    NOON_MULTIPORT = "noon_multiport"


def visibility_factor(steps: int, coupling: float, initial_occupation: float) -> float:
    """1 - exp(-N²μ²(1+2n̄)/4)."""
    return float(-np.expm1(-(steps**2) * coupling**2 * (1 + 2 * initial_occupation) / 4))


def relax_time(mech_frequency: float, quality_factor: float) -> float:
    """T_r = min(1/γ, 2e3·π/ω) with γ = ω/Q."""
    return float(min(quality_factor / mech_frequency, 2e3 * np.pi / mech_frequency))


def run_time(probability: float, steps: int, mech_frequency: float, quality_factor: float, runs: int) -> float:
    """T_tot = runs·(2πN/ω + T_r)/P_N."""
    if probability <= 0:
        raise ConfigValidationError("herald_probability", "P_N must be positive to estimate a run time")
    period = 2 * np.pi * steps / mech_frequency
    return float(runs * (period + relax_time(mech_frequency, quality_factor)) / probability)


class HeraldingService:
    """Service class for success probabilities and timing."""

    def __init__(self, decoherence_service: DecoherenceService):
        self.decoherence_service = decoherence_service
        self.logger = get_logger(__name__)

    def coherent_probability(
        self, steps: int, coupling: float, initial_occupation: float, efficiency: float, alpha: complex
    ) -> float:
        """2^{1-N} e^{-2Nη|α|²} η^N |α|^{2N} {1 - exp[-N²μ²(1+2n̄)/4]}."""
        amp2 = abs(alpha) ** 2
        return float(
            2.0 ** (1 - steps)
            * np.exp(-2 * steps * efficiency * amp2)
            * (efficiency * amp2) ** steps
            * visibility_factor(steps, coupling, initial_occupation)
        )

    def photon_probability(self, steps: int, coupling: float, initial_occupation: float, efficiency: float) -> float:
        """2^{1-N} η^N {1 - exp[-N²μ²(1+2n̄)/4]}."""
        return float(2.0 ** (1 - steps) * efficiency**steps * visibility_factor(steps, coupling, initial_occupation))

    def herald_probability(self, config: ProtocolConfig) -> float:
        """
        Canonical heralding probability of the cat schedule.

        Args:
            config: Protocol configuration

        Returns:
            P_N for the configured input kind
        """
        if config.input_kind is InputKind.COHERENT:
            return self.coherent_probability(
                config.steps, config.coupling, config.initial_occupation, config.efficiency, config.alpha
            )
        return self.photon_probability(config.steps, config.coupling, config.initial_occupation, config.efficiency)

    def operator_trace_probability(self, config: ProtocolConfig) -> float:
        """
        Tr[M ρ_n̄ M†] for the composed click operator M = Σ c_k e^{ikμX}.

        Uses Tr[e^{i(k-k')μX} ρ_n̄] = exp(-(k-k')²μ²(1+2n̄)/4). Coherent input uses
        √η·α; single-photon input carries η per step.
        """
        alpha = np.sqrt(config.efficiency) * config.alpha
        composed = compose(descriptors_for(config, alpha=alpha))
        exponents = composed.exponents
        c = composed.coefficients[exponents]
        diff = exponents[:, None] - exponents[None, :]
        overlap = np.exp(-(diff**2) * config.coupling**2 * (1 + 2 * config.initial_occupation) / 4)
        trace = float(np.real(c @ overlap @ c.conj()))
        if config.input_kind is InputKind.SINGLE_PHOTON:
            trace *= config.efficiency**config.steps
        return trace

    def expected_probability_ratio(self, config: ProtocolConfig) -> float:
        """Documented operator-trace / canonical ratio: 2^{-N} for single photons, 1 for coherent input."""
        return 2.0 ** (-config.steps) if config.input_kind is InputKind.SINGLE_PHOTON else 1.0

    def scheme_scaling(self, kind: SchemeKind, steps: int) -> float:
        """Optimal-amplitude prefactor of each heralding scheme."""
        if steps < 1:
            raise ConfigValidationError("steps", "must be at least 1")
        kind = SchemeKind(kind)
        if kind is SchemeKind.COHERENT_MULTISTEP:
            return float(2.0 ** (1 - 2 * steps) * np.exp(-steps))
        if kind is SchemeKind.PHOTON_MULTISTEP:
            return float(2.0 ** (1 - steps))
        return float(2.0 ** (1 - steps) * np.exp(-steps))

    def noon_probability(
        self, photons: int, alpha: complex, coupling: float, initial_occupation: float, phase: float
    ) -> float:
        """2N_p^{-N_p} e^{-2|α|²} |α|^{2N_p} {1 - (-1)^{N_p} exp[-N_p²μ²(1+2n̄)/4] cos(N_p φ)}."""
        if photons < 1:
            raise ConfigValidationError("photons", "multiport size must be at least 1")
        amp2 = abs(alpha) ** 2
        fringe = (-1) ** photons * np.exp(-(photons**2) * coupling**2 * (1 + 2 * initial_occupation) / 4)
        return float(
            2 * photons ** (-photons) * np.exp(-2 * amp2) * amp2**photons * (1 - fringe * np.cos(photons * phase))
        )

    def optimal_coherent_amplitude(self, efficiency: float) -> float:
        """|α| maximizing the coherent P_N: √η|α| = 1/√2."""
        return float(1 / np.sqrt(2 * efficiency))

    def relax_time(self, device: DeviceParams) -> float:
        return relax_time(device.mech_frequency, device.quality_factor)

    def total_time(
        self, config: ProtocolConfig, device: DeviceParams, timing: Optional[TimingParams] = None
    ) -> float:
        """
        Total experiment time for the configured number of runs.

        Args:
            config: Protocol configuration
            device: Device supplying ω and Q
            timing: Run-count convention

        Returns:
            T_tot in seconds

        Raises:
            ConfigValidationError: if P_N is zero
        """
        timing = timing or TimingParams()
        probability = self.herald_probability(config)
        return run_time(probability, config.steps, device.mech_frequency, device.quality_factor, timing.runs)

    def herald_report(
        self, config: ProtocolConfig, device: DeviceParams, timing: Optional[TimingParams] = None
    ) -> HeraldReport:
        """Both probabilities, timing, feasibility and the coherent-input comparison."""
        start_time = time.time()

        try:
            timing = timing or TimingParams()
            probability = self.herald_probability(config)
            operator_trace = self.operator_trace_probability(config)
            total = self.total_time(config, device, timing)

            n_th, env = self.decoherence_service.per_step_thermal_for(device)
            feasibility = self.decoherence_service.feasibility_check(env, config.steps) if env else None

            coherent_total = coherent_ratio = None
            if config.input_kind is InputKind.SINGLE_PHOTON:
                amplitude = self.optimal_coherent_amplitude(config.efficiency)
                coherent = config.model_copy(update={"input_kind": InputKind.COHERENT, "alpha": complex(amplitude)})
                coherent_total = self.total_time(coherent, device, timing)
                coherent_ratio = coherent_total / total

            report = HeraldReport(
                label=device.label,
                steps=config.steps,
                herald_probability=probability,
                operator_trace_probability=operator_trace,
                probability_ratio=operator_trace / probability if probability > 0 else float("nan"),
                expected_ratio=self.expected_probability_ratio(config),
                relax_time=self.relax_time(device),
                total_time=total,
                per_step_thermal=n_th,
                feasibility=feasibility,
                coherent_total_time=coherent_total,
                coherent_time_ratio=coherent_ratio,
            )

            duration = time.time() - start_time
            log_service_operation(
                logger=self.logger,
                service="HeraldingService",
                operation="herald_report",
                duration=duration,
                label=device.label,
                herald_probability=probability,
                total_time=total,
            )
            return report

        except Exception as e:
            duration = time.time() - start_time
            self.logger.error(
                "Service operation failed",
                service="HeraldingService",
                operation="herald_report",
                error=str(e),
                duration_ms=round(duration * 1000, 2),
                exc_info=True,
            )
            raise
