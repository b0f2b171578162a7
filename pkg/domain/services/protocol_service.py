"""
Service layer for measurement operators and click sequences.
"""

import time
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from core.config import settings
from core.logging import get_logger, log_service_operation
from domain.entities.operators import OperatorDescriptor, Phase
from domain.entities.phase_space import PhaseSpaceState
from domain.models.exceptions import ConfigValidationError
from domain.models.requests.protocol import CatBranch, InputKind, PhaseOrdering, ProtocolConfig
from domain.services.decoherence_service import DecoherenceService, apply_thermal_channel
from domain.services.phase_space_service import PhaseSpaceService, merge, total_integral
from domain.utils.operator_algebra import cat_phases, descriptor_for, resolve_phases


class CatParity(str, Enum):
    EVEN_CAT = "even_cat"
    ODD_CAT = "odd_cat"


def step_terms(state: PhaseSpaceState, op: OperatorDescriptor) -> PhaseSpaceState:
    """Σ_{k,k'} c_k c_k'* e^{ikμX} ρ e^{-ik'μX}, unmerged."""
    exponents = op.exponents
    c = op.coefficients[exponents]
    left, right = np.meshgrid(exponents * op.coupling, exponents * op.coupling, indexing="ij")
    left, right = left.reshape(-1), right.reshape(-1)
    pair = np.outer(c, c.conj()).reshape(-1)
    shift = 0.5 * (left + right)

    weights = pair[:, None] * state.weights[None, :] * np.exp(-1j * state.kp[None, :] * shift[:, None])
    count = pair.size
    return PhaseSpaceState(
        weights=weights.reshape(-1),
        x0=np.tile(state.x0, count),
        p0=(state.p0[None, :] + shift[:, None]).reshape(-1),
        s=np.tile(state.s, count),
        kx=(state.kx[None, :] + (left - right)[:, None]).reshape(-1),
        kp=np.tile(state.kp, count),
    )


class ProtocolService:
    """Service class for the multistep heralded protocol."""

    def __init__(self, phase_space_service: PhaseSpaceService, decoherence_service: DecoherenceService):
        self.phase_space_service = phase_space_service
        self.decoherence_service = decoherence_service
        self.logger = get_logger(__name__)

    def measurement_operator(self, config: ProtocolConfig, step: int, alpha: Optional[complex] = None) -> OperatorDescriptor:
        """
        Click operator of step j (1-based).

        Args:
            config: Protocol configuration
            step: Step index j in 1..N
            alpha: Override of the coherent amplitude

        Returns:
            Operator descriptor Σ c_k e^{ikμX}
        """
        if not 1 <= step <= config.steps:
            raise ConfigValidationError("step", f"step {step} outside 1..{config.steps}")
        phase = resolve_phases(config)[step - 1]
        outcome = config.outcomes()[step - 1]
        return descriptor_for(
            config.coupling,
            config.input_kind,
            outcome,
            phase,
            config.alpha if alpha is None else alpha,
        )

    def apply_step(self, state: PhaseSpaceState, op: OperatorDescriptor) -> PhaseSpaceState:
        """
        Apply ρ → MρM† for M = Σ c_k e^{ikμX}; the result is unnormalized.

        Args:
            state: Input state
            op: Measurement operator

        Returns:
            Merged state whose trace is the step's conditional weight
        """
        return merge(step_terms(state, op), settings.merge_key_tolerance, settings.merge_drop_relative)

    def cat_phase_schedule(
        self, steps: int, branch: CatBranch, ordering: PhaseOrdering = PhaseOrdering.FORMULA
    ) -> List[Phase]:
        """φ_j = 2πj/N for click01, 2πj/N + π for click10, reduced mod 2π."""
        return cat_phases(steps, branch, ordering)

    def sequence_states(self, config: ProtocolConfig) -> Tuple[List[PhaseSpaceState], List[float]]:
        """
        Normalized states after each step, starting from the thermal input.

        Returns:
            (states[0..N], cumulative success weights[0..N])
        """
        start_time = time.time()

        try:
            alpha = config.alpha
            if config.input_kind is InputKind.COHERENT and config.efficiency < 1:
                # small-loss effective operator
                alpha = np.sqrt(config.efficiency) * config.alpha
            herald_factor = config.efficiency if config.input_kind is InputKind.SINGLE_PHOTON else 1.0

            state = PhaseSpaceState.thermal(config.initial_occupation)
            states = [state]
            weights = [1.0]
            cumulative = 1.0
            for step in range(1, config.steps + 1):
                op = self.measurement_operator(config, step, alpha=alpha)
                raw = self.apply_step(state, op)
                if config.per_step_thermal > 0:
                    raw = apply_thermal_channel(raw, config.per_step_thermal)
                    raw = merge(raw, settings.merge_key_tolerance, settings.merge_drop_relative)
                trace = total_integral(raw).real
                state = self.phase_space_service.normalize(raw)
                cumulative *= trace * herald_factor
                states.append(state)
                weights.append(cumulative)
                self.logger.debug("Step applied", step=step, terms=len(state), trace=trace)

            duration = time.time() - start_time
            log_service_operation(
                logger=self.logger,
                service="ProtocolService",
                operation="run_sequence",
                duration=duration,
                steps=config.steps,
                terms=len(state),
                success_weight=cumulative,
            )
            return states, weights

        except Exception as e:
            duration = time.time() - start_time
            self.logger.error(
                "Service operation failed",
                service="ProtocolService",
                operation="run_sequence",
                steps=config.steps,
                error=str(e),
                duration_ms=round(duration * 1000, 2),
                exc_info=True,
            )
            raise

    def run_sequence(self, config: ProtocolConfig) -> Tuple[PhaseSpaceState, float]:
        """
        Run all N steps, with one thermal channel after each step when n̄_th > 0.

        Args:
            config: Protocol configuration

        Returns:
            (normalized final state, success weight)

        Raises:
            ZeroTraceError: if the click sequence cancels the state
        """
        states, weights = self.sequence_states(config)
        return states[-1], weights[-1]

    def build_scs(self, steps: int, coupling: float, initial_occupation: float) -> PhaseSpaceState:
        """
        Ideal odd cat: populations at (0,0) and (0,Nμ), fringe pair at (0,Nμ/2).

        Args:
            steps: N
            coupling: μ
            initial_occupation: n̄
        """
        separation = steps * coupling
        if separation == 0:
            raise ConfigValidationError("coupling", "Nμ must be nonzero")
        s = 1 + 2 * initial_occupation
        norm = 0.5 / (1 - np.exp(-(separation**2) * s / 4))
        amplitude = norm / (np.pi * s)
        return PhaseSpaceState(
            weights=[amplitude, amplitude, -amplitude, -amplitude],
            x0=[0.0, 0.0, 0.0, 0.0],
            p0=[0.0, separation, separation / 2, separation / 2],
            s=[s, s, s, s],
            kx=[0.0, 0.0, separation, -separation],
            kp=[0.0, 0.0, 0.0, 0.0],
            normalized=True,
        )

    def parity_class(
        self,
        steps: int,
        coupling: float,
        outcome: Tuple[int, int] = (1, 0),
        schedule: CatBranch = CatBranch.CLICK01,
    ) -> CatParity:
        """
        Parity of ∏_j (z ± e^{iφ_j}) = c_N z^N + c_0.

        Args:
            steps: N
            coupling: μ (parity does not depend on it)
            outcome: Single-photon click (1,0) or (0,1) repeated at every step
            schedule: click01 for plain phases 2πj/N, click10 for the +π shift

        Raises:
            ConfigValidationError: if the product is not a two-component cat
        """
        if coupling <= 0:
            raise ConfigValidationError("coupling", "must be positive")
        product = np.array([1.0 + 0j])
        for phase in cat_phases(steps, schedule):
            factor = descriptor_for(coupling, InputKind.SINGLE_PHOTON, outcome, phase).coefficients
            product = P.polymul(product, factor)
        middle = np.abs(product[1:-1]).max() if product.size > 2 else 0.0
        ratio = product[0] / product[-1]
        if middle > 1e-12 * np.abs(product).max() or not np.isclose(abs(ratio), 1.0):
            raise ConfigValidationError("phases", "sequence does not produce a two-component cat")
        if np.isclose(ratio, -1.0):
            return CatParity.ODD_CAT
        if np.isclose(ratio, 1.0):
            return CatParity.EVEN_CAT
        raise ConfigValidationError("phases", f"cat components have relative phase {ratio:.3f}")
