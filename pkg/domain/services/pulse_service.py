"""
Service layer for the coupling delivered by a shaped optical pulse.
"""

import time
from typing import Tuple

import numpy as np

from core.config import settings
from core.logging import get_logger, log_service_operation
from domain.entities.pulse import Envelope
from domain.models.exceptions import ConfigValidationError, PulseIntegrationError
from domain.models.requests.pulse import CavityParams, EnvelopeKind, EnvelopeSpec
from domain.models.responses.pulse import PulseCouplingResponse
from domain.utils.quadrature import map_nodes

PANEL_ORDER = 24
INITIAL_PANELS = 8
MAX_PANELS = 4096


def _panel_edges(segments: np.ndarray, panels: int) -> Tuple[np.ndarray, np.ndarray]:
    edges = np.concatenate(
        [np.linspace(a, b, panels + 1)[:-1] for a, b in zip(segments[:-1], segments[1:])] + [segments[-1:]]
    )
    return edges[:-1], edges[1:]


def response_integrals(envelope: Envelope, panels: int) -> Tuple[float, float]:
    """
    ∫e^{-2τ}|F(τ)|²dτ with F(τ) = ∫_{-∞}^τ e^{τ'}f̂(τ')dτ', and ∫|f̂|².

    F is accumulated panel by panel: its value at each outer node is the running
    total up to the panel start plus a Gauss–Legendre integral over the partial
    panel. Beyond the support F is constant and the tail is e^{-2b}|F(b)|²/2.
    """
    lower, upper = _panel_edges(envelope.segments(), panels)
    nodes, weights = map_nodes(lower, upper, PANEL_ORDER)

    source = np.exp(nodes) * envelope(nodes)
    panel_totals = (weights * source).sum(axis=1)
    running = np.concatenate([[0.0], np.cumsum(panel_totals)[:-1]])

    # partial panel [a_i, τ_q] for every outer node τ_q
    inner_nodes, inner_weights = map_nodes(
        np.broadcast_to(lower[:, None], nodes.shape), nodes, PANEL_ORDER
    )
    partial = (inner_weights * np.exp(inner_nodes) * envelope(inner_nodes)).sum(axis=-1)
    response = running[:, None] + partial

    body = float((weights * np.exp(-2 * nodes) * np.abs(response) ** 2).sum())
    final = running[-1] + panel_totals[-1]
    tail = float(np.exp(-2 * upper[-1]) * abs(final) ** 2 / 2)
    norm = float((weights * np.abs(envelope(nodes)) ** 2).sum())
    return body + tail, norm


class PulseService:
    """Service class for pulse-shape couplings."""

    def __init__(self):
        self.logger = get_logger(__name__)

    def envelope_from(self, spec: EnvelopeSpec, kappa: float) -> Envelope:
        """
        Build the dimensionless envelope f̂(τ) = f(τ/κ)/√κ.

        Args:
            spec: Envelope description in seconds
            kappa: Cavity decay κ (rad/s)
        """
        if kappa <= 0:
            raise ConfigValidationError("kappa", "must be positive")
        cutoff = settings.pulse_envelope_cutoff
        if spec.kind is EnvelopeKind.MATCHED:
            return Envelope.matched(cutoff)
        if spec.kind is EnvelopeKind.SQUARE:
            return Envelope.square(spec.duration * kappa, spec.center * kappa)
        if spec.kind is EnvelopeKind.GAUSSIAN:
            return Envelope.gaussian(spec.width * kappa, spec.center * kappa, cutoff)
        if spec.samples is None:
            raise ConfigValidationError("samples", "table envelope samples were not loaded")
        samples = np.asarray(spec.samples, dtype=float)
        return Envelope.table(samples[:, 0] * kappa, (samples[:, 1] + 1j * samples[:, 2]) / np.sqrt(kappa))

    def matched_envelope(self) -> Envelope:
        return Envelope.matched(settings.pulse_envelope_cutoff)

    def integrate(self, envelope: Envelope) -> Tuple[float, float]:
        """
        Response integral, refined by doubling the panels per segment.

        Returns:
            (integral, relative change on the last refinement)

        Raises:
            PulseIntegrationError: if the envelope is not normalized or the
                refinement does not settle
        """
        rtol = settings.pulse_relative_tolerance
        panels = INITIAL_PANELS
        value, norm = response_integrals(envelope, panels)
        if not np.isfinite(value):
            raise PulseIntegrationError(f"response integral of {envelope.label} diverges")
        while panels < MAX_PANELS:
            panels *= 2
            refined, norm = response_integrals(envelope, panels)
            change = abs(refined - value) / max(abs(refined), 1e-300)
            value = refined
            if change <= rtol:
                if abs(norm - 1) > 1e-8:
                    raise PulseIntegrationError(
                        f"envelope {envelope.label} has ∫|f|² = {norm:.10f}, expected 1"
                    )
                return value, change
        raise PulseIntegrationError(f"response integral of {envelope.label} did not converge")

    def coupling_from_pulse(self, params: CavityParams) -> PulseCouplingResponse:
        """
        μ = √8 (g₀/κ) ∫ e^{-2τ} |∫_{-∞}^τ e^{τ'} f̂(τ') dτ'|² dτ.

        Args:
            params: Cavity coupling, decay and envelope

        Returns:
            Coupling response with the refinement error

        Raises:
            PulseIntegrationError: if the envelope is not normalized
        """
        start_time = time.time()

        try:
            envelope = self.envelope_from(params.envelope, params.kappa)
            integral, change = self.integrate(envelope)
            per_ratio = float(np.sqrt(8) * integral)
            response = PulseCouplingResponse(
                coupling=per_ratio * params.g0 / params.kappa,
                coupling_per_g0_over_kappa=per_ratio,
                envelope=envelope.label,
                relative_error=change,
            )

            duration = time.time() - start_time
            log_service_operation(
                logger=self.logger,
                service="PulseService",
                operation="coupling_from_pulse",
                duration=duration,
                envelope=envelope.label,
                coupling=response.coupling,
            )
            return response

        except Exception as e:
            duration = time.time() - start_time
            self.logger.error(
                "Service operation failed",
                service="PulseService",
                operation="coupling_from_pulse",
                error=str(e),
                duration_ms=round(duration * 1000, 2),
                exc_info=True,
            )
            raise
