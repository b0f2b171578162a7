"""
Measurement-operator value types.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import numpy as np

from domain.models.exceptions import ConfigValidationError

# e^{2πi t} for turns t whose value is exactly representable
_EXACT_UNITS = {
    Fraction(0): 1.0 + 0.0j,
    Fraction(1, 4): 1.0j,
    Fraction(1, 2): -1.0 + 0.0j,
    Fraction(3, 4): -1.0j,
}


@dataclass(frozen=True)
class Phase:
    """A phase stored either exactly in turns (multiples of 2π) or in radians."""

    turns: Optional[Fraction] = None
    radians_value: Optional[float] = None

    def __post_init__(self):
        if (self.turns is None) == (self.radians_value is None):
            raise ConfigValidationError("phase", "exactly one of turns or radians is required")
        if self.turns is not None:
            object.__setattr__(self, "turns", Fraction(self.turns) % 1)

    @classmethod
    def of_turns(cls, numerator: int, denominator: int = 1) -> "Phase":
        return cls(turns=Fraction(numerator, denominator))

    @classmethod
    def parse(cls, value: Union["Phase", Fraction, str, float, int]) -> "Phase":
        """Numbers are radians; strings like "2/5" are turns."""
        if isinstance(value, Phase):
            return value
        if isinstance(value, Fraction):
            return cls(turns=value)
        if isinstance(value, str):
            try:
                return cls(turns=Fraction(value.strip()))
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigValidationError("phases", f"cannot parse phase {value!r}") from exc
        return cls(radians_value=float(value))

    def shifted_half_turn(self) -> "Phase":
        if self.turns is not None:
            return Phase(turns=self.turns + Fraction(1, 2))
        return Phase(radians_value=self.radians_value + np.pi)

    @property
    def radians(self) -> float:
        if self.turns is not None:
            return float(2 * np.pi * self.turns)
        return float(np.mod(self.radians_value, 2 * np.pi))

    def unit(self) -> complex:
        """e^{iφ}, exact for quarter turns."""
        if self.turns is not None:
            exact = _EXACT_UNITS.get(self.turns)
            if exact is not None:
                return exact
            return complex(np.exp(2j * np.pi * float(self.turns)))
        return complex(np.exp(1j * self.radians_value))

    def __str__(self) -> str:
        if self.turns is not None:
            return f"{self.turns.numerator}/{self.turns.denominator}"
        return repr(self.radians_value)


@dataclass(frozen=True, eq=False)
class OperatorDescriptor:
    """Σ_k c_k e^{i k μ X}, stored densely by exponent k = 0..K."""

    coefficients: np.ndarray
    coupling: float
    label: str = field(default="", compare=False)

    def __post_init__(self):
        coefficients = np.atleast_1d(np.asarray(self.coefficients, dtype=complex)).copy()
        nonzero = np.flatnonzero(coefficients != 0)
        if nonzero.size == 0:
            raise ConfigValidationError("operator", "descriptor needs a nonzero coefficient")
        coefficients = coefficients[: nonzero[-1] + 1]
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def identity(cls, coupling: float, scale: complex = 1.0) -> "OperatorDescriptor":
        return cls(np.array([scale], dtype=complex), coupling, label="identity")

    @classmethod
    def displacement(cls, coupling: float, exponent: int = 1) -> "OperatorDescriptor":
        coefficients = np.zeros(exponent + 1, dtype=complex)
        coefficients[exponent] = 1.0
        return cls(coefficients, coupling, label=f"exp({exponent}iμX)")

    @property
    def terms(self) -> List[Tuple[complex, int]]:
        return [(complex(c), int(k)) for k, c in enumerate(self.coefficients) if c != 0]

    @property
    def exponents(self) -> np.ndarray:
        return np.flatnonzero(self.coefficients != 0)

    def scaled(self, factor: complex) -> "OperatorDescriptor":
        return OperatorDescriptor(self.coefficients * factor, self.coupling, self.label)

    def __matmul__(self, other: "OperatorDescriptor") -> "OperatorDescriptor":
        if not np.isclose(self.coupling, other.coupling):
            raise ConfigValidationError("operator", "descriptors must share one coupling")
        return OperatorDescriptor(np.convolve(self.coefficients, other.coefficients), self.coupling)

    def __len__(self) -> int:
        return int(self.exponents.size)
