"""
Truncated Fock-basis density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import qutip


@dataclass(frozen=True, eq=False)
class FockDensity:
    """D×D density matrix in the number basis 0..D-1."""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex, copy=True)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("density matrix must be square")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_qobj(cls, rho: qutip.Qobj) -> "FockDensity":
        return cls(rho.full())

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def qobj(self) -> qutip.Qobj:
        return qutip.Qobj(np.array(self.matrix))

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalized(self) -> "FockDensity":
        return FockDensity(self.matrix / self.trace())

    def leakage(self, levels: int = 5) -> float:
        """Population in the top levels relative to the trace."""
        diagonal = np.diag(self.matrix).real
        return float(diagonal[-levels:].sum() / diagonal.sum())

    def hermiticity_error(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T)).min())

    def trace_distance(self, other: "FockDensity") -> float:
        dimension = max(self.dimension, other.dimension)
        a = self.padded(dimension).matrix
        b = other.padded(dimension).matrix
        return float(0.5 * np.abs(np.linalg.eigvalsh(a - b)).sum())

    def padded(self, dimension: int) -> "FockDensity":
        if dimension == self.dimension:
            return self
        matrix = np.zeros((dimension, dimension), dtype=complex)
        d = min(dimension, self.dimension)
        matrix[:d, :d] = self.matrix[:d, :d]
        return FockDensity(matrix)
