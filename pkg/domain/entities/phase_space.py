"""
Phase-space representation of Wigner functions.

A state is a finite sum of isotropic Gaussians modulated by plane-wave fringes,

    W(X, P) = sum_t w_t exp[i(kx_t X + kp_t P)] exp[-((X - x0_t)^2 + (P - p0_t)^2) / s_t]

stored column-wise in read-only numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np

from domain.models.exceptions import ConfigValidationError


@dataclass(frozen=True)
class WignerTerm:
    """A single Gaussian-fringe term."""

    weight: complex
    center: Tuple[float, float]
    s: float
    wavevector: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.s > 0:
            raise ConfigValidationError("s", f"variance parameter must be positive, got {self.s}")
        if not all(np.isfinite(c) for c in self.center):
            raise ConfigValidationError("center", "center must be real and finite")


def _frozen(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True).reshape(-1)
    array.setflags(write=False)
    return array


class PhaseSpaceState:
    """Immutable sum of Wigner terms."""

    __slots__ = ("weights", "x0", "p0", "s", "kx", "kp", "normalized")

    def __init__(self, weights, x0, p0, s, kx, kp, normalized: bool = False):
        self.weights = _frozen(weights, complex)
        self.x0 = _frozen(x0, float)
        self.p0 = _frozen(p0, float)
        self.s = _frozen(s, float)
        self.kx = _frozen(kx, float)
        self.kp = _frozen(kp, float)
        self.normalized = bool(normalized)

        sizes = {a.size for a in (self.weights, self.x0, self.p0, self.s, self.kx, self.kp)}
        if len(sizes) != 1:
            raise ConfigValidationError("terms", "term arrays must share one length")
        if self.s.size and not np.all(self.s > 0):
            raise ConfigValidationError("s", "variance parameters must be positive")

    @classmethod
    def from_terms(cls, terms: Iterable[WignerTerm], normalized: bool = False) -> "PhaseSpaceState":
        terms = list(terms)
        return cls(
            weights=[t.weight for t in terms],
            x0=[t.center[0] for t in terms],
            p0=[t.center[1] for t in terms],
            s=[t.s for t in terms],
            kx=[t.wavevector[0] for t in terms],
            kp=[t.wavevector[1] for t in terms],
            normalized=normalized,
        )

    @classmethod
    def empty(cls) -> "PhaseSpaceState":
        return cls([], [], [], [], [], [])

    @classmethod
    def thermal(cls, occupation: float = 0.0) -> "PhaseSpaceState":
        """Thermal state with mean occupation n̄ (vacuum for n̄ = 0)."""
        if occupation < 0:
            raise ConfigValidationError("initial_occupation", "must be nonnegative")
        s = 1.0 + 2.0 * occupation
        return cls([1.0 / (np.pi * s)], [0.0], [0.0], [s], [0.0], [0.0], normalized=True)

    @property
    def terms(self) -> List[WignerTerm]:
        return [
            WignerTerm(
                weight=complex(w),
                center=(float(x), float(p)),
                s=float(s),
                wavevector=(float(kx), float(kp)),
            )
            for w, x, p, s, kx, kp in zip(self.weights, self.x0, self.p0, self.s, self.kx, self.kp)
        ]

    def replace(self, **changes) -> "PhaseSpaceState":
        """Copy with some columns replaced. The result is unnormalized unless stated."""
        fields = {name: getattr(self, name) for name in ("weights", "x0", "p0", "s", "kx", "kp")}
        fields["normalized"] = False
        fields.update(changes)
        return PhaseSpaceState(**fields)

    def scaled(self, factor: complex) -> "PhaseSpaceState":
        return self.replace(weights=self.weights * factor)

    def shifted(self, dx: float = 0.0, dp: float = 0.0) -> "PhaseSpaceState":
        """Rigid translation of the whole state by (dx, dp)."""
        phase = np.exp(-1j * (self.kx * dx + self.kp * dp))
        return self.replace(
            weights=self.weights * phase,
            x0=self.x0 + dx,
            p0=self.p0 + dp,
            normalized=self.normalized,
        )

    @classmethod
    def concatenate(cls, states: Iterable["PhaseSpaceState"]) -> "PhaseSpaceState":
        states = list(states)
        if not states:
            return cls.empty()
        return cls(
            weights=np.concatenate([st.weights for st in states]),
            x0=np.concatenate([st.x0 for st in states]),
            p0=np.concatenate([st.p0 for st in states]),
            s=np.concatenate([st.s for st in states]),
            kx=np.concatenate([st.kx for st in states]),
            kp=np.concatenate([st.kp for st in states]),
        )

    def __add__(self, other: "PhaseSpaceState") -> "PhaseSpaceState":
        return PhaseSpaceState.concatenate([self, other])

    def __len__(self) -> int:
        return int(self.weights.size)

    def __repr__(self) -> str:
        return f"PhaseSpaceState(terms={len(self)}, normalized={self.normalized})"


@dataclass(frozen=True)
class Grid:
    """Rectangular sampling grid in zero-point units."""

    x_min: float
    x_max: float
    p_min: float
    p_max: float
    nx: int
    np: int

    def __post_init__(self):
        if self.nx < 2 or self.np < 2:
            raise ConfigValidationError("grid", "nx and np must be at least 2")
        if not (self.x_min < self.x_max and self.p_min < self.p_max):
            raise ConfigValidationError("grid", "bounds must be ordered")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def p(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.np)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / (self.np - 1)

    def with_samples(self, nx: int, np_: int) -> "Grid":
        return Grid(self.x_min, self.x_max, self.p_min, self.p_max, nx, np_)

    def refined(self) -> "Grid":
        """Same bounds, halved spacing."""
        return self.with_samples(2 * self.nx - 1, 2 * self.np - 1)

    def to_dict(self) -> dict:
        return {
            "x_min": self.x_min,
            "x_max": self.x_max,
            "p_min": self.p_min,
            "p_max": self.p_max,
            "nx": self.nx,
            "np": self.np,
        }


class MarginalDensity:
    """Quadrature marginal p(u) as a sum of one-dimensional Gaussian-fringe terms.

    p(u) = Re sum_t w_t exp(i k_t u) exp(-(u - c_t)^2 / s_t)
    """

    __slots__ = ("weights", "centers", "s", "k", "angle")

    def __init__(self, weights, centers, s, k, angle: float):
        self.weights = _frozen(weights, complex)
        self.centers = _frozen(centers, float)
        self.s = _frozen(s, float)
        self.k = _frozen(k, float)
        self.angle = float(angle)

    def _factors(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        d = u[:, None] - self.centers[None, :]
        base = self.weights[None, :] * np.exp(1j * self.k[None, :] * u[:, None] - d**2 / self.s[None, :])
        slope = 1j * self.k[None, :] - 2.0 * d / self.s[None, :]
        return base, slope

    def density(self, u) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        base, _ = self._factors(u)
        return base.sum(axis=1).real

    def derivatives(self, u) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """p, p' and p'' at the sample points."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        base, slope = self._factors(u)
        p = base.sum(axis=1).real
        dp = (base * slope).sum(axis=1).real
        d2p = (base * (slope**2 - 2.0 / self.s[None, :])).sum(axis=1).real
        return p, dp, d2p

    def total(self) -> float:
        """Analytic integral over the real line."""
        return float(
            (self.weights * np.sqrt(np.pi * self.s) * np.exp(1j * self.k * self.centers - self.k**2 * self.s / 4)).sum().real
        )

    def support(self, span: float) -> Tuple[float, float]:
        if self.centers.size == 0:
            return -span, span
        width = span * np.sqrt(self.s.max())
        return float(self.centers.min() - width), float(self.centers.max() + width)

    def __len__(self) -> int:
        return int(self.weights.size)
