"""
Service layer for phase-space term algebra and Wigner-function evaluation.
"""

import time
from typing import Optional, Tuple

import numpy as np

from core.config import settings
from core.logging import get_logger, log_service_operation
from domain.entities.phase_space import Grid, MarginalDensity, PhaseSpaceState, WignerTerm
from domain.models.exceptions import (
    HermiticityError,
    NormalizationError,
    UnnormalizedStateError,
    ZeroTraceError,
)


def term_integrals(state: PhaseSpaceState) -> np.ndarray:
    """Closed-form integral of every term over the plane."""
    return (
        state.weights
        * np.pi
        * state.s
        * np.exp(1j * (state.kx * state.x0 + state.kp * state.p0))
        * np.exp(-(state.kx**2 + state.kp**2) * state.s / 4)
    )


def total_integral(state: PhaseSpaceState) -> complex:
    return complex(term_integrals(state).sum())


def axis_factors(coord: np.ndarray, center: np.ndarray, s: np.ndarray, k: np.ndarray, order: int = 0) -> np.ndarray:
    """Per-axis factor exp(ik u - (u-c)^2/s) and its u-derivatives, shape (len(coord), terms)."""
    d = coord[:, None] - center[None, :]
    base = np.exp(1j * k[None, :] * coord[:, None] - d**2 / s[None, :])
    if order == 0:
        return base
    slope = 1j * k[None, :] - 2.0 * d / s[None, :]
    if order == 1:
        return base * slope
    if order == 2:
        return base * (slope**2 - 2.0 / s[None, :])
    raise ValueError(f"unsupported derivative order {order}")


def field_on_grid(
    state: PhaseSpaceState, x: np.ndarray, p: np.ndarray, order_x: int = 0, order_p: int = 0
) -> np.ndarray:
    """Complex sum of terms (or a partial derivative) on the tensor grid x ⊗ p."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if len(state) == 0:
        return np.zeros((x.size, p.size), dtype=complex)
    h = axis_factors(x, state.x0, state.s, state.kx, order_x) * state.weights[None, :]
    g = axis_factors(p, state.p0, state.s, state.kp, order_p)
    return h @ g.T


def field_at_points(state: PhaseSpaceState, x, p) -> np.ndarray:
    """Real part of W at scattered points."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if len(state) == 0:
        return np.zeros(np.broadcast(x, p).shape)
    x, p = np.broadcast_arrays(x, p)
    shape = x.shape
    x = x.reshape(-1)[:, None]
    p = p.reshape(-1)[:, None]
    values = state.weights[None, :] * np.exp(
        1j * (state.kx[None, :] * x + state.kp[None, :] * p)
        - ((x - state.x0[None, :]) ** 2 + (p - state.p0[None, :]) ** 2) / state.s[None, :]
    )
    return values.sum(axis=1).real.reshape(shape)


def merge(state: PhaseSpaceState, key_tolerance: float, drop_relative: float) -> PhaseSpaceState:
    """Combine terms with matching (center, s, wavevector) and drop negligible weights."""
    if len(state) == 0:
        return state
    keys = np.stack([state.x0, state.p0, state.s, state.kx, state.kp], axis=1)
    quantized = np.round(keys / key_tolerance).astype(np.int64)
    _, first, inverse = np.unique(quantized, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    weights = np.zeros(first.size, dtype=complex)
    np.add.at(weights, inverse, state.weights)

    order = np.argsort(first, kind="stable")
    first = first[order]
    weights = weights[order]

    scale = np.abs(weights).max() if weights.size else 0.0
    keep = np.abs(weights) >= drop_relative * scale if scale > 0 else np.zeros(weights.size, dtype=bool)
    first = first[keep]
    return PhaseSpaceState(
        weights=weights[keep],
        x0=state.x0[first],
        p0=state.p0[first],
        s=state.s[first],
        kx=state.kx[first],
        kp=state.kp[first],
        normalized=state.normalized,
    )


def displace_one_sided(state: PhaseSpaceState, left: float, right: float) -> PhaseSpaceState:
    """ρ → e^{i·left·X} ρ e^{-i·right·X}."""
    shift = 0.5 * (left + right)
    return state.replace(
        weights=state.weights * np.exp(-1j * state.kp * shift),
        p0=state.p0 + shift,
        kx=state.kx + (left - right),
        normalized=False,
    )


def rotate_to_marginal(
    state: PhaseSpaceState, angle: float, key_tolerance: float, drop_relative: float
) -> MarginalDensity:
    """Integrate out the quadrature orthogonal to X_λ = X cos λ + P sin λ."""
    c, s_ = np.cos(angle), np.sin(angle)
    center_u = state.x0 * c + state.p0 * s_
    center_v = -state.x0 * s_ + state.p0 * c
    k_u = state.kx * c + state.kp * s_
    k_v = -state.kx * s_ + state.kp * c
    weights = state.weights * np.sqrt(np.pi * state.s) * np.exp(1j * k_v * center_v - k_v**2 * state.s / 4)

    keys = np.stack([center_u, state.s, k_u], axis=1)
    quantized = np.round(keys / key_tolerance).astype(np.int64)
    _, first, inverse = np.unique(quantized, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    merged = np.zeros(first.size, dtype=complex)
    np.add.at(merged, inverse, weights)
    order = np.argsort(first, kind="stable")
    first, merged = first[order], merged[order]
    scale = np.abs(merged).max() if merged.size else 0.0
    keep = np.abs(merged) >= drop_relative * scale
    first = first[keep]
    return MarginalDensity(merged[keep], center_u[first], state.s[first], k_u[first], angle)


def bounding_box(state: PhaseSpaceState, span: float) -> Tuple[float, float, float, float]:
    """Box covering all term centers plus ``span`` Gaussian standard deviations."""
    if len(state) == 0:
        return -span, span, -span, span
    sigma = np.sqrt(state.s.max() / 2)
    return (
        float(state.x0.min() - span * sigma),
        float(state.x0.max() + span * sigma),
        float(state.p0.min() - span * sigma),
        float(state.p0.max() + span * sigma),
    )


def resolving_spacing(state: PhaseSpaceState, samples_per_period: int) -> float:
    """Spacing giving every fringe and every Gaussian enough samples."""
    sigma_min = np.sqrt(state.s.min() / 2) if len(state) else 1.0
    spacing = sigma_min / 4
    k_max = float(np.max(np.hypot(state.kx, state.kp))) if len(state) else 0.0
    if k_max > 0:
        spacing = min(spacing, 2 * np.pi / (samples_per_period * k_max))
    return spacing


class PhaseSpaceService:
    """Service class for Gaussian-fringe Wigner-function algebra."""

    def __init__(self):
        self.logger = get_logger(__name__)

    def term_integral(self, term: WignerTerm) -> complex:
        """
        Closed-form integral of a single term.

        Args:
            term: Gaussian-fringe term

        Returns:
            w·π·s·exp[i(k·c)]·exp(-|k|²s/4)
        """
        return total_integral(PhaseSpaceState.from_terms([term]))

    def integral(self, state: PhaseSpaceState) -> complex:
        return total_integral(state)

    def evaluate(self, state: PhaseSpaceState, grid: Grid) -> np.ndarray:
        """
        Evaluate W on a grid.

        Args:
            state: State to evaluate
            grid: Sampling grid

        Returns:
            Real array of shape (grid.nx, grid.np), indexed [x, p]

        Raises:
            HermiticityError: if the imaginary residue exceeds the tolerance
        """
        start_time = time.time()

        try:
            self.logger.debug("Evaluating state", terms=len(state), nx=grid.nx, np=grid.np)
            field = field_on_grid(state, grid.x, grid.p)
            scale = float(np.abs(field.real).max()) if field.size else 0.0
            residue = float(np.abs(field.imag).max()) if field.size else 0.0
            if residue > settings.imaginary_tolerance * max(scale, 1e-300):
                raise HermiticityError(
                    f"imaginary residue {residue:.3e} exceeds {settings.imaginary_tolerance:g} of max |W| {scale:.3e}"
                )

            duration = time.time() - start_time
            log_service_operation(
                logger=self.logger,
                service="PhaseSpaceService",
                operation="evaluate",
                duration=duration,
                terms=len(state),
                points=grid.nx * grid.np,
            )
            return field.real

        except Exception as e:
            duration = time.time() - start_time
            self.logger.error(
                "Service operation failed",
                service="PhaseSpaceService",
                operation="evaluate",
                error=str(e),
                duration_ms=round(duration * 1000, 2),
                exc_info=True,
            )
            raise

    def normalize(self, state: PhaseSpaceState) -> PhaseSpaceState:
        """
        Rescale weights so the analytic integral is exactly one.

        Raises:
            ZeroTraceError: if the terms cancel completely
            NormalizationError: if the integral is not real
        """
        integrals = term_integrals(state)
        total = complex(integrals.sum())
        magnitude = float(np.abs(integrals).sum())
        if len(state) == 0 or abs(total) <= 1e-13 * magnitude or abs(total) == 0.0:
            raise ZeroTraceError("state integral vanishes; the click sequence cancels the state")
        if abs(total.imag) > settings.normalization_tolerance * abs(total):
            raise NormalizationError(f"state integral {total} is not real")
        normalized = state.replace(weights=state.weights / total.real, normalized=True)
        self.logger.debug("State normalized", terms=len(state), scale=total.real)
        return normalized

    def merge_terms(self, state: PhaseSpaceState, key_tolerance: Optional[float] = None) -> PhaseSpaceState:
        """
        Combine terms sharing center, variance and wavevector.

        Args:
            state: State to compact
            key_tolerance: Key matching tolerance (default from settings)

        Returns:
            State with merged weights and negligible terms dropped
        """
        start_time = time.time()
        key_tolerance = settings.merge_key_tolerance if key_tolerance is None else key_tolerance
        merged = merge(state, key_tolerance, settings.merge_drop_relative)
        log_service_operation(
            logger=self.logger,
            service="PhaseSpaceService",
            operation="merge_terms",
            duration=time.time() - start_time,
            terms_in=len(state),
            terms_out=len(merged),
        )
        return merged

    def marginal(self, state: PhaseSpaceState, angle: float) -> MarginalDensity:
        """
        Quadrature marginal p(X_λ) in closed form.

        Raises:
            UnnormalizedStateError: if the state is not normalized
        """
        if not state.normalized:
            raise UnnormalizedStateError("marginal requires a normalized state")
        return rotate_to_marginal(state, angle, settings.merge_key_tolerance, settings.merge_drop_relative)

    def one_sided_displacement(self, state: PhaseSpaceState, left: float, right: float) -> PhaseSpaceState:
        """ρ → e^{i·left·X} ρ e^{-i·right·X} on the term list."""
        return displace_one_sided(state, left, right)

    def default_grid(self, state: PhaseSpaceState, nx: Optional[int] = None, np_: Optional[int] = None) -> Grid:
        """
        Grid covering the state's terms with fringe-resolving spacing.

        Args:
            state: State to cover
            nx: Optional fixed number of X samples
            np_: Optional fixed number of P samples
        """
        x_min, x_max, p_min, p_max = bounding_box(state, settings.grid_sigma_span)
        spacing = resolving_spacing(state, settings.grid_samples_per_period)

        def samples(length: float) -> int:
            return int(min(settings.max_grid_points, max(65, np.ceil(length / spacing) + 1)))

        return Grid(
            x_min=x_min,
            x_max=x_max,
            p_min=p_min,
            p_max=p_max,
            nx=nx or samples(x_max - x_min),
            np=np_ or samples(p_max - p_min),
        )
