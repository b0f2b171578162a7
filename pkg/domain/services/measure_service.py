"""
Service layer for non-classicality and macroscopicity measures.
"""

import time
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import ndimage, optimize

from core.config import settings
from core.logging import get_logger, log_service_operation
from domain.entities.phase_space import MarginalDensity, PhaseSpaceState
from domain.models.exceptions import UnnormalizedStateError
from domain.models.responses.measures import MeasureReport
from domain.services.phase_space_service import (
    PhaseSpaceService,
    axis_factors,
    bounding_box,
    field_at_points,
    field_on_grid,
    resolving_spacing,
    rotate_to_marginal,
)
from domain.utils.quadrature import map_nodes, trapezoid_doubling, trapezoid_weights

# Nμ at or below which populations and fringes overlap too much for the δ series
SERIES_MIN_SEPARATION = 6.0

_SQRT2 = np.sqrt(2.0)


class Regime(str, Enum):
    FOCK_LIKE = "fock_like"
    KITTEN = "kitten"
    CAT = "cat"


def _require_normalized(state: PhaseSpaceState) -> None:
    if not state.normalized:
        raise UnnormalizedStateError("measures require a normalized state")


def _measure_box(state: PhaseSpaceState) -> Tuple[float, float, float, float]:
    # measure_sigma_span is in units of sqrt(s); bounding_box counts σ = sqrt(s/2)
    return bounding_box(state, settings.measure_sigma_span * _SQRT2)


def minimum_of(state: PhaseSpaceState) -> Tuple[float, Tuple[float, float], float]:
    """Grid scan, then Nelder–Mead from the lowest local minima."""
    x_min, x_max, p_min, p_max = bounding_box(state, settings.grid_sigma_span)
    spacing = resolving_spacing(state, settings.grid_samples_per_period)
    nx = int(min(settings.max_grid_points, max(65, np.ceil((x_max - x_min) / spacing) + 1)))
    np_ = int(min(settings.max_grid_points, max(65, np.ceil((p_max - p_min) / spacing) + 1)))
    x = np.linspace(x_min, x_max, nx)
    p = np.linspace(p_min, p_max, np_)
    field = field_on_grid(state, x, p).real

    if field.min() >= 0:
        i, j = np.unravel_index(np.argmin(field), field.shape)
        return float(field[i, j]), (float(x[i]), float(p[j])), 0.0

    local = (ndimage.minimum_filter(field, size=3, mode="nearest") == field) & (field < 0)
    candidates = np.argwhere(local)
    order = np.argsort(field[local])[:6]

    def objective(v: np.ndarray) -> float:
        return float(field_at_points(state, v[0], v[1])[0])

    best_value, best_location, spread = np.inf, (0.0, 0.0), 0.0
    for i, j in candidates[order]:
        result = optimize.minimize(
            objective,
            x0=np.array([x[i], p[j]]),
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": settings.min_w_tolerance * 1e-3, "maxiter": 4000},
        )
        if result.fun < best_value:
            best_value = float(result.fun)
            best_location = (float(result.x[0]), float(result.x[1]))
            simplex_values = result.final_simplex[1]
            spread = float(simplex_values.max() - simplex_values.min())
    return best_value, best_location, spread


class _RowModel:
    """W restricted to P rows: terms sharing an X factor are summed per row."""

    def __init__(self, state: PhaseSpaceState):
        self.state = state
        keys = np.round(np.stack([state.x0, state.s, state.kx], axis=1) / settings.merge_key_tolerance)
        _, first, inverse = np.unique(keys.astype(np.int64), axis=0, return_index=True, return_inverse=True)
        self.x0 = state.x0[first]
        self.s = state.s[first]
        self.kx = state.kx[first]
        self.indicator = np.zeros((len(state), first.size))
        self.indicator[np.arange(len(state)), inverse.reshape(-1)] = 1.0

    def coefficients(self, p_rows: np.ndarray) -> np.ndarray:
        """Row weights of the distinct X factors, shape (rows, factors)."""
        st = self.state
        per_term = axis_factors(p_rows, st.p0, st.s, st.kp) * st.weights[None, :]
        return per_term @ self.indicator

    def scan(self, coefficients: np.ndarray, x: np.ndarray) -> np.ndarray:
        return (coefficients @ axis_factors(x, self.x0, self.s, self.kx).T).real

    def values(self, coefficients: np.ndarray, x: np.ndarray, chunk: int = 2_000_000) -> np.ndarray:
        """W at points x[b, q] on the rows given by coefficients[b]."""
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape)
        per_row = max(1, chunk // max(1, x[0].size * self.kx.size))
        for lo in range(0, x.shape[0], per_row):
            xs = x[lo : lo + per_row]
            d = xs[..., None] - self.x0
            base = np.exp(1j * self.kx * xs[..., None] - d**2 / self.s)
            out[lo : lo + per_row] = np.einsum("b...t,bt->b...", base, coefficients[lo : lo + per_row]).real
        return out


def _row_negative_integrals(
    model: _RowModel, p_rows: np.ndarray, x_scan: np.ndarray, threshold: float
) -> Tuple[np.ndarray, np.ndarray]:
    """∫ max(-W, 0) dX along each row, with the order-8/order-16 difference."""
    coefficients = model.coefficients(p_rows)
    scan = model.scan(coefficients, x_scan) + threshold
    negative = scan < 0
    totals = np.zeros(p_rows.size)
    errors = np.zeros(p_rows.size)
    if not negative.any():
        return totals, errors

    # Illinois iteration on every sign-change bracket at once
    r_idx, c_idx = np.nonzero(negative[:, 1:] != negative[:, :-1])
    a, b = x_scan[c_idx].copy(), x_scan[c_idx + 1].copy()
    fa, fb = scan[r_idx, c_idx].copy(), scan[r_idx, c_idx + 1].copy()
    bracket_coefficients = coefficients[r_idx]
    for _ in range(16):
        c = b - fb * (b - a) / (fb - fa)
        c = np.where(np.isfinite(c) & (c > np.minimum(a, b)) & (c < np.maximum(a, b)), c, 0.5 * (a + b))
        fc = model.values(bracket_coefficients, c[:, None])[:, 0] + threshold
        flip = np.sign(fc) != np.sign(fb)
        a = np.where(flip, b, a)
        fa = np.where(flip, fb, 0.5 * fa)
        b, fb = c, fc
        if np.max(np.abs(b - a)) < 1e-12:
            break
    roots = b

    starts, ends, owners = [], [], []
    for r in np.unique(r_idx):
        edges = np.concatenate([[x_scan[0]], np.sort(roots[r_idx == r]), [x_scan[-1]]])
        inside = bool(negative[r, 0])
        for lo, hi in zip(edges[:-1], edges[1:]):
            if inside:
                starts.append(lo)
                ends.append(hi)
                owners.append(r)
            inside = not inside
    for r in np.nonzero(negative.all(axis=1))[0]:
        starts.append(x_scan[0])
        ends.append(x_scan[-1])
        owners.append(r)
    if not owners:
        return totals, errors

    starts, ends, owners = np.array(starts), np.array(ends), np.array(owners)
    owner_coefficients = coefficients[owners]
    results = {}
    for order in (8, 16):
        points, weights = map_nodes(starts, ends, order)
        results[order] = -(model.values(owner_coefficients, points) * weights).sum(axis=1)
    np.add.at(totals, owners, results[16])
    np.add.at(errors, owners, np.abs(results[16] - results[8]))
    return totals, errors


def negative_volume_of(state: PhaseSpaceState) -> Tuple[float, float]:
    """δ = ∫ max(-W, 0) (equal to ½(∫|W| - 1) for normalized W) and an error estimate.

    Each P row is split at the sign changes of W along X and integrated by
    Gauss–Legendre; rows are combined by a trapezoid rule doubled to tolerance.
    """
    x_min, x_max, p_min, p_max = _measure_box(state)
    k_max = float(np.max(np.abs(state.kx))) if len(state) else 0.0
    spacing = np.sqrt(state.s.min()) / 8
    if k_max > 0:
        spacing = min(spacing, np.pi / (4 * k_max))
    x_scan = np.linspace(x_min, x_max, int(np.ceil((x_max - x_min) / spacing)) + 1)

    peak = float(np.abs(field_on_grid(state, x_scan[:: max(1, x_scan.size // 64)], np.linspace(p_min, p_max, 65))).max())
    threshold = 1e-14 * peak

    model = _RowModel(state)
    rows = 129
    p_rows = np.linspace(p_min, p_max, rows)
    g, gl_error = _row_negative_integrals(model, p_rows, x_scan, threshold)
    h = p_rows[1] - p_rows[0]
    total = float((g * trapezoid_weights(rows, h)).sum())
    gl_total = float((gl_error * trapezoid_weights(rows, h)).sum())
    change = np.inf
    while rows < settings.max_grid_points:
        midpoints = p_rows[:-1] + 0.5 * h
        g_mid, err_mid = _row_negative_integrals(model, midpoints, x_scan, threshold)
        new_total = 0.5 * total + 0.5 * h * float(g_mid.sum())
        gl_total = 0.5 * gl_total + 0.5 * h * float(err_mid.sum())
        change = abs(new_total - total)
        p_rows = np.sort(np.concatenate([p_rows, midpoints]))
        h *= 0.5
        rows = 2 * rows - 1
        total = new_total
        if change < settings.delta_tolerance and rows >= 513:
            break
    return max(total, 0.0), float(change + gl_total)


def lee_jeong_of(state: PhaseSpaceState) -> Tuple[float, float, float]:
    """Both trapezoid forms of 𝓘 and the change under grid refinement."""
    x_min, x_max, p_min, p_max = _measure_box(state)
    k_max = float(np.max(np.hypot(state.kx, state.kp))) if len(state) else 0.0
    bandwidth = 2 * k_max + 17 / np.sqrt(state.s.min())
    spacing = 2 * np.pi / bandwidth

    def forms(h: float) -> Tuple[float, float]:
        nx = int(np.ceil((x_max - x_min) / h)) + 1
        np_ = int(np.ceil((p_max - p_min) / h)) + 1
        x = np.linspace(x_min, x_max, nx)
        p = np.linspace(p_min, p_max, np_)
        area = np.outer(trapezoid_weights(nx, x[1] - x[0]), trapezoid_weights(np_, p[1] - p[0]))
        w = field_on_grid(state, x, p).real
        wx = field_on_grid(state, x, p, order_x=1).real
        wp = field_on_grid(state, x, p, order_p=1).real
        laplacian = field_on_grid(state, x, p, order_x=2).real + field_on_grid(state, x, p, order_p=2).real
        laplacian_form = -0.5 * np.pi * float((w * (laplacian + 2 * w) * area).sum())
        gradient_form = 0.5 * np.pi * float(((wx**2 + wp**2 - 2 * w**2) * area).sum())
        return laplacian_form, gradient_form

    coarse = forms(spacing)
    fine = forms(spacing / 2)
    return fine[0], fine[1], abs(fine[0] - coarse[0])


def cfi_of(marginal: MarginalDensity, fixed_points: Optional[int] = None) -> Tuple[float, float]:
    """Classical Fisher information ∫ p'^2/p of a quadrature marginal."""
    lower, upper = marginal.support(settings.measure_sigma_span)
    u_peak = np.linspace(lower, upper, 257)
    peak = float(np.abs(marginal.density(u_peak)).max())
    cutoff = settings.cfi_zero_threshold * peak

    def integrand(u: np.ndarray) -> np.ndarray:
        p, dp, d2p = marginal.derivatives(u)
        out = np.empty_like(p)
        regular = p > cutoff
        out[regular] = dp[regular] ** 2 / p[regular]
        # p ≈ a u^2 near an exact zero, where p'^2/p → 4a = 2p''
        out[~regular] = 2 * d2p[~regular]
        return out

    if fixed_points is not None:
        u = np.linspace(lower, upper, fixed_points)
        return float((integrand(u) * trapezoid_weights(u.size, u[1] - u[0])).sum()), np.inf
    return trapezoid_doubling(integrand, lower, upper, start=257, rtol=settings.cfi_relative_tolerance)


def wrap_angle(angle: float) -> float:
    """Reduce a quadrature angle to [0, π)."""
    reduced = float(angle % np.pi)
    return 0.0 if reduced >= np.pi else reduced


def macroscopicity_of(state: PhaseSpaceState) -> Tuple[float, float, float]:
    """𝓜 = ½ max_λ F_λ via a λ scan and bounded Brent refinement."""
    key, drop = settings.merge_key_tolerance, settings.merge_drop_relative
    count = settings.lambda_scan_points
    angles = np.arange(count) * np.pi / count
    scan = np.array([cfi_of(rotate_to_marginal(state, a, key, drop), fixed_points=1025)[0] for a in angles])
    best = int(np.argmax(scan))
    step = np.pi / count

    def negative_cfi(angle: float) -> float:
        return -cfi_of(rotate_to_marginal(state, angle, key, drop))[0]

    result = optimize.minimize_scalar(
        negative_cfi,
        bounds=(angles[best] - step, angles[best] + step),
        method="bounded",
        options={"xatol": 1e-8},
    )
    candidates = [(float(-result.fun), float(result.x)), (-negative_cfi(angles[best]), float(angles[best]))]
    value, angle = max(candidates)
    _, change = cfi_of(rotate_to_marginal(state, angle, key, drop))
    return 0.5 * value, wrap_angle(angle), 0.5 * change


class MeasureService:
    """Service class for the four state measures."""

    def __init__(self, phase_space_service: PhaseSpaceService):
        self.phase_space_service = phase_space_service
        self.logger = get_logger(__name__)

    def min_wigner(self, state: PhaseSpaceState) -> Tuple[float, Tuple[float, float]]:
        """
        Global minimum of W.

        Returns:
            (value, (X, P) location)
        """
        _require_normalized(state)
        value, location, _ = minimum_of(state)
        return value, location

    def negative_volume(self, state: PhaseSpaceState) -> float:
        """Negative volume δ = ½(∫∫|W| - 1)."""
        _require_normalized(state)
        return negative_volume_of(state)[0]

    def scs_delta_series(self, steps: int, coupling: float, initial_occupation: float) -> float:
        """
        Closed-form δ of the ideal cat from its Poisson-summed series.

        The series neglects the overlap of populations and fringes, so it only
        tracks the quadrature value once Nμ is large. A warning is logged for
        Nμ ≤ 6 and whenever the result exceeds the 1/π bound on δ.

        Args:
            steps: N
            coupling: μ
            initial_occupation: n̄
        """
        separation = steps * coupling
        a = separation**2 * (1 + 2 * initial_occupation)
        norm = 0.5 / (-np.expm1(-a / 4))

        total = 1.0
        k = 1
        while True:
            added = 0.0
            for kk in (k, -k):
                sign = (-1) ** kk
                added += np.exp(-(kk**2) * a) * sign / (1 + sign * 2 * kk)
            total += added
            if np.exp(-(k**2) * a) < 1e-16:
                break
            k += 1
        tail = np.exp(-a / 4) / (-np.expm1(-a / 4))
        value = float(0.5 * (4 * norm / np.pi * total + tail))
        if separation <= SERIES_MIN_SEPARATION or value > 1 / np.pi:
            self.logger.warning(
                "Series evaluated outside its validity range",
                separation=separation,
                minimum=SERIES_MIN_SEPARATION,
                value=value,
            )
        return value

    def lee_jeong(self, state: PhaseSpaceState) -> float:
        """Lee–Jeong measure 𝓘 = -(π/2)∫∫W(∇²+2)W."""
        _require_normalized(state)
        return lee_jeong_of(state)[0]

    def cfi_quadrature(self, state: PhaseSpaceState, angle: float) -> float:
        """
        Classical Fisher information of the quadrature X_λ.

        Args:
            state: Normalized state
            angle: λ in radians
        """
        marginal = self.phase_space_service.marginal(state, angle)
        return cfi_of(marginal)[0]

    def macroscopicity(self, state: PhaseSpaceState) -> Tuple[float, float]:
        """
        Macroscopicity 𝓜 = ½ max_λ F_λ.

        Returns:
            (𝓜, optimal λ in [-π/2, π/2))
        """
        _require_normalized(state)
        value, angle, _ = macroscopicity_of(state)
        return value, angle

    def regime_classify(self, steps: int, coupling: float, initial_occupation: float = 0.0) -> Regime:
        """fock_like below Nμ = 1/√2, cat above 4/√2, both scaled by √(1+2n̄)."""
        separation = steps * coupling
        scale = np.sqrt(1 + 2 * initial_occupation)
        if separation < scale / _SQRT2:
            return Regime.FOCK_LIKE
        if separation > 4 * scale / _SQRT2:
            return Regime.CAT
        return Regime.KITTEN

    def report(self, state: PhaseSpaceState, inputs: Optional[Dict[str, object]] = None) -> MeasureReport:
        """
        Evaluate all four measures with error estimates.

        Args:
            state: Normalized state
            inputs: Parameters echoed into the report

        Returns:
            MeasureReport
        """
        start_time = time.time()

        try:
            _require_normalized(state)
            self.logger.debug("Evaluating measures", terms=len(state))

            min_value, min_location, min_error = minimum_of(state)
            delta, delta_error = negative_volume_of(state)
            laplacian_form, gradient_form, lj_error = lee_jeong_of(state)
            macro, angle, macro_error = macroscopicity_of(state)

            report = MeasureReport(
                min_w=min_value,
                min_w_location=min_location,
                delta=delta,
                lee_jeong=laplacian_form,
                lee_jeong_gradient_form=gradient_form,
                macroscopicity=macro,
                optimal_lambda=angle,
                errors={
                    "min_w": min_error,
                    "delta": delta_error,
                    "lee_jeong": max(lj_error, abs(laplacian_form - gradient_form)),
                    "macroscopicity": macro_error,
                },
                inputs=dict(inputs or {}),
            )

            duration = time.time() - start_time
            log_service_operation(
                logger=self.logger,
                service="MeasureService",
                operation="report",
                duration=duration,
                terms=len(state),
                min_w=min_value,
                delta=delta,
                lee_jeong=laplacian_form,
                macroscopicity=macro,
            )
            return report

        except Exception as e:
            duration = time.time() - start_time
            self.logger.error(
                "Service operation failed",
                service="MeasureService",
                operation="report",
                error=str(e),
                duration_ms=round(duration * 1000, 2),
                exc_info=True,
            )
            raise
