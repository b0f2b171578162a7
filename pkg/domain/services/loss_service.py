"""
Service layer for optical loss ahead of the detectors.
"""

import itertools
import math
import time
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import stats

from core.logging import get_logger, log_service_operation
from domain.entities.operators import OperatorDescriptor, Phase
from domain.entities.phase_space import PhaseSpaceState
from domain.models.exceptions import ConfigValidationError
from domain.models.requests.loss import LossModel
from domain.models.requests.protocol import InputKind, ProtocolConfig
from domain.services.heralding_service import HeraldingService
from domain.services.protocol_service import ProtocolService
from domain.utils.operator_algebra import descriptor_for


class LossService:
    """Service class for beam-splitter loss on the optical arms."""

    def __init__(self, protocol_service: ProtocolService, heralding_service: HeraldingService):
        self.protocol_service = protocol_service
        self.heralding_service = heralding_service
        self.logger = get_logger(__name__)

    def resolve(self, config: ProtocolConfig, loss: LossModel) -> LossModel:
        """
        Loss model with η and α filled in from the run.

        Raises:
            ConfigValidationError: If the model's η or α disagrees with the run's
        """
        for field in ("efficiency", "alpha"):
            given = getattr(loss, field)
            expected = getattr(config, field)
            if given is not None and abs(complex(given) - complex(expected)) > 1e-12 * max(1.0, abs(expected)):
                raise ConfigValidationError(field, f"loss model has {given}, protocol run has {expected}")
        return loss.model_copy(update={"efficiency": config.efficiency, "alpha": config.alpha})

    def effective_coherent_operator(
        self,
        efficiency: float,
        alpha: complex,
        outcome: Tuple[int, int],
        phase: Phase,
        coupling: float,
    ) -> OperatorDescriptor:
        """Click operator with α replaced by √η·α."""
        return descriptor_for(coupling, InputKind.COHERENT, outcome, phase, np.sqrt(efficiency) * complex(alpha))

    def lost_photon_mean(self, config: ProtocolConfig, loss: LossModel) -> float:
        """Mean total photon number lost over N steps, N(1-η)|α|²."""
        loss = self.resolve(config, loss)
        return config.steps * (1 - loss.efficiency) * abs(complex(loss.alpha)) ** 2

    def loss_mixture_weights(self, config: ProtocolConfig, loss: LossModel) -> np.ndarray:
        """
        Poisson weights of the total lost-photon count K, truncated at tail mass ε.

        Returns:
            Weights for K = 0..K_max, renormalized to sum to one
        """
        mean = self.lost_photon_mean(config, loss)
        if mean == 0:
            return np.array([1.0])
        k_max = int(stats.poisson.isf(loss.truncation_tail, mean)) + 1
        weights = stats.poisson.pmf(np.arange(k_max + 1), mean)
        return weights / weights.sum()

    def direct_mixture_weights(self, config: ProtocolConfig, loss: LossModel, per_step_max: int) -> Dict[int, float]:
        """
        Product-sum over per-step lost counts k_1..k_N, grouped by K = Σk_i.

        Only meant for small N and truncations.
        """
        loss = self.resolve(config, loss)
        per_step = (1 - loss.efficiency) * abs(complex(loss.alpha)) ** 2
        single = np.array([per_step**k / math.factorial(k) for k in range(per_step_max + 1)])
        grouped: Dict[int, float] = {}
        for counts in itertools.product(range(per_step_max + 1), repeat=config.steps):
            grouped[sum(counts)] = grouped.get(sum(counts), 0.0) + float(np.prod(single[list(counts)]))
        total = sum(grouped.values())
        return {k: v / total for k, v in sorted(grouped.items())}

    def loss_mixture_state(
        self, config: ProtocolConfig, loss: LossModel, base: Optional[PhaseSpaceState] = None
    ) -> PhaseSpaceState:
        """
        Poisson mixture of the lossless cat shifted by Kμ along P.

        Args:
            config: Protocol configuration (coherent input)
            loss: Loss model
            base: Lossless state; defaults to the run with the effective √η·α
                operator, decohered when n̄_th > 0 (composed mode)

        Returns:
            Normalized mixture state
        """
        start_time = time.time()

        try:
            if loss.input_kind is not InputKind.COHERENT:
                raise ConfigValidationError("input_kind", "loss mixtures apply to coherent input")
            loss = self.resolve(config, loss)
            composed = config.per_step_thermal > 0
            if base is None:
                base, _ = self.protocol_service.run_sequence(config)

            weights = self.loss_mixture_weights(config, loss)
            copies: List[PhaseSpaceState] = [
                base.shifted(dp=k * config.coupling).scaled(weight) for k, weight in enumerate(weights)
            ]
            state = PhaseSpaceState.concatenate(copies).replace(normalized=True)

            duration = time.time() - start_time
            log_service_operation(
                logger=self.logger,
                service="LossService",
                operation="loss_mixture_state",
                duration=duration,
                efficiency=loss.efficiency,
                components=len(weights),
                composed_extension=composed,
            )
            return state

        except Exception as e:
            duration = time.time() - start_time
            self.logger.error(
                "Service operation failed",
                service="LossService",
                operation="loss_mixture_state",
                error=str(e),
                duration_ms=round(duration * 1000, 2),
                exc_info=True,
            )
            raise

    def single_photon_loss_effect(self, efficiency: float) -> float:
        """Per-step heralding factor for single-photon input; the state is unchanged."""
        if not 0 <= efficiency <= 1:
            raise ConfigValidationError("efficiency", "must lie in [0, 1]")
        return float(efficiency)

    def lossy_herald_probability(self, config: ProtocolConfig, loss: LossModel) -> float:
        """
        Heralding probability summed over lost photons.

        Σ_{k_i} ∏|C_{k_i}|² collapses to exp(N(1-η)|α|²) times the η-form
        coherent probability; the Poisson sum is truncated at tail mass ε.
        """
        loss = self.resolve(config, loss)
        lossless_form = self.heralding_service.coherent_probability(
            config.steps,
            config.coupling,
            config.initial_occupation,
            loss.efficiency,
            complex(loss.alpha),
        )
        mean = self.lost_photon_mean(config, loss)
        if mean == 0:
            return lossless_form
        k_max = int(stats.poisson.isf(loss.truncation_tail, mean)) + 1
        k = np.arange(k_max + 1)
        # Σ_K mean^K / K! = e^{mean}, truncated like the mixture
        series = float(np.exp(stats.poisson.logpmf(k, mean) + mean).sum())
        return lossless_form * series
