"""
Quadrature helpers shared by the measure and pulse services.
"""

from functools import lru_cache
from typing import Callable, Tuple

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def map_nodes(a: np.ndarray, b: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre points and weights for each interval [a_i, b_i], shape (intervals, order)."""
    nodes, weights = gauss_legendre(order)
    half = 0.5 * (np.asarray(b) - np.asarray(a))
    mid = 0.5 * (np.asarray(b) + np.asarray(a))
    points = mid[..., None] + half[..., None] * nodes
    return points, half[..., None] * weights


def trapezoid_doubling(
    integrand: Callable[[np.ndarray], np.ndarray],
    lower: float,
    upper: float,
    start: int = 257,
    rtol: float = 1e-8,
    max_points: int = 2**16 + 1,
) -> Tuple[float, float]:
    """
    Uniform trapezoid rule, doubling resolution until the relative change is below rtol.

    Only new midpoints are evaluated at each level.

    Returns:
        (integral, last absolute change)
    """
    x = np.linspace(lower, upper, start)
    h = x[1] - x[0]
    values = integrand(x)
    total = h * (values.sum() - 0.5 * (values[0] + values[-1]))
    n = start
    change = np.inf
    while 2 * n - 1 <= max_points:
        midpoints = x[:-1] + 0.5 * h
        new_total = 0.5 * total + 0.5 * h * integrand(midpoints).sum()
        change = abs(new_total - total)
        x = np.sort(np.concatenate([x, midpoints]))
        h *= 0.5
        n = 2 * n - 1
        total = new_total
        if change <= rtol * max(abs(total), 1e-300):
            break
    return float(total), float(change)


def trapezoid_weights(n: int, h: float) -> np.ndarray:
    weights = np.full(n, h)
    weights[0] = weights[-1] = 0.5 * h
    return weights
