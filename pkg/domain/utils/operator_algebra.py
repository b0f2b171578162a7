"""
Construction of measurement-operator descriptors and cat phase schedules.
"""

from math import factorial, sqrt
from typing import List, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from domain.entities.operators import OperatorDescriptor, Phase
from domain.models.exceptions import ConfigValidationError
from domain.models.requests.protocol import CatBranch, InputKind, PhaseOrdering, ProtocolConfig


def cat_phases(steps: int, branch: CatBranch, ordering: PhaseOrdering = PhaseOrdering.FORMULA) -> List[Phase]:
    """φ_j = 2πj/N (click01) or 2πj/N + π (click10), kept as exact turns."""
    if steps < 1:
        raise ConfigValidationError("steps", "cat schedule needs at least one step")
    offset = 1 if ordering is PhaseOrdering.FORMULA else 0
    phases = [Phase.of_turns(j + offset, steps) for j in range(steps)]
    if branch is CatBranch.CLICK10:
        phases = [phase.shifted_half_turn() for phase in phases]
    return phases


def resolve_phases(config: ProtocolConfig) -> List[Phase]:
    if config.phases is not None:
        return [Phase.parse(phase) for phase in config.phases]
    return cat_phases(config.steps, config.branch, config.ordering)


def descriptor_for(
    coupling: float,
    input_kind: InputKind,
    outcome: Tuple[int, int],
    phase: Phase,
    alpha: complex = 0.0,
) -> OperatorDescriptor:
    """Expand the click operator into Σ c_k e^{ikμX}."""
    m, n = (int(c) for c in outcome)
    unit = phase.unit()
    if input_kind is InputKind.SINGLE_PHOTON:
        if (m, n) == (1, 0):
            coefficients = [0.5 * unit, 0.5]
        elif (m, n) == (0, 1):
            coefficients = [-0.5 * unit, 0.5]
        else:
            raise ConfigValidationError(
                "click_sequence", f"outcome {(m, n)} is not a single-photon herald"
            )
        return OperatorDescriptor(np.array(coefficients, dtype=complex), coupling, label=f"{(m, n)}@{phase}")

    if m < 0 or n < 0:
        raise ConfigValidationError("click_sequence", f"invalid outcome {(m, n)}")
    alpha = complex(alpha)
    prefactor = np.exp(-abs(alpha) ** 2) / sqrt(factorial(m) * factorial(n)) * (alpha / sqrt(2)) ** (m + n)
    plus = P.polypow(np.array([unit, 1.0], dtype=complex), m)
    minus = P.polypow(np.array([-unit, 1.0], dtype=complex), n)
    coefficients = prefactor * P.polymul(plus, minus)
    if not np.any(coefficients != 0):
        raise ConfigValidationError("alpha", "coherent amplitude gives a vanishing operator")
    return OperatorDescriptor(coefficients, coupling, label=f"{(m, n)}@{phase}")


def descriptors_for(config: ProtocolConfig, alpha: complex = None) -> List[OperatorDescriptor]:
    phases = resolve_phases(config)
    outcomes = config.outcomes()
    alpha = config.alpha if alpha is None else alpha
    return [
        descriptor_for(config.coupling, config.input_kind, outcome, phase, alpha)
        for outcome, phase in zip(outcomes, phases)
    ]


def compose(descriptors: Sequence[OperatorDescriptor]) -> OperatorDescriptor:
    """Operator product; the factors commute."""
    product = descriptors[0]
    for descriptor in descriptors[1:]:
        product = product @ descriptor
    return product
