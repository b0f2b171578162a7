"""
Optical pulse envelopes in dimensionless time τ = κt.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np

from domain.models.exceptions import PulseIntegrationError


@dataclass(frozen=True, eq=False)
class Envelope:
    """
    Envelope f̂(τ) normalized so that ∫|f̂|²dτ = 1.

    ``support`` bounds the region where |f̂| exceeds the cutoff; ``breakpoints``
    lists kinks and jumps inside it so quadrature panels never straddle them.
    """

    label: str
    function: Callable[[np.ndarray], np.ndarray]
    support: Tuple[float, float]
    breakpoints: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        lower, upper = self.support
        if not (np.isfinite(lower) and np.isfinite(upper)) or upper <= lower:
            raise PulseIntegrationError(f"envelope {self.label} has no finite support")

    def __call__(self, tau: np.ndarray) -> np.ndarray:
        return np.asarray(self.function(np.asarray(tau, dtype=float)), dtype=complex)

    def segments(self) -> np.ndarray:
        lower, upper = self.support
        inner = [b for b in self.breakpoints if lower < b < upper]
        return np.array(sorted({lower, upper, *inner}))

    @classmethod
    def matched(cls, cutoff: float) -> "Envelope":
        """f̂(τ) = exp(-|τ|), the shape matched to the cavity line."""
        extent = np.log(1 / cutoff)
        return cls("matched", lambda tau: np.exp(-np.abs(tau)), (-extent, extent), (0.0,))

    @classmethod
    def square(cls, duration: float, center: float = 0.0) -> "Envelope":
        lower, upper = center - duration / 2, center + duration / 2
        height = 1 / np.sqrt(duration)

        def function(tau):
            return np.where((tau >= lower) & (tau <= upper), height, 0.0)

        return cls("square", function, (lower, upper))

    @classmethod
    def gaussian(cls, width: float, center: float, cutoff: float) -> "Envelope":
        """π^{-1/4} w^{-1/2} exp(-(τ-c)²/(2w²))."""
        extent = width * np.sqrt(2 * np.log(1 / cutoff))

        def function(tau):
            return np.pi**-0.25 / np.sqrt(width) * np.exp(-((tau - center) ** 2) / (2 * width**2))

        return cls("gaussian", function, (center - extent, center + extent), (center,))

    @classmethod
    def table(cls, tau: np.ndarray, values: np.ndarray) -> "Envelope":
        """Piecewise-linear interpolation of samples, zero outside them."""
        tau = np.asarray(tau, dtype=float)
        values = np.asarray(values, dtype=complex)
        order = np.argsort(tau)
        tau, values = tau[order], values[order]
        if tau.size < 2 or np.any(np.diff(tau) <= 0):
            raise PulseIntegrationError("envelope table needs at least two distinct sample times")

        def function(t):
            real = np.interp(t, tau, values.real, left=0.0, right=0.0)
            imag = np.interp(t, tau, values.imag, left=0.0, right=0.0)
            return real + 1j * imag

        return cls("table", function, (float(tau[0]), float(tau[-1])), tuple(tau[1:-1]))
