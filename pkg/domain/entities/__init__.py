"""
Value types of the simulation: phase-space states, operator descriptors,
Fock-basis densities and pulse envelopes.
"""

from .fock import FockDensity
from .operators import OperatorDescriptor, Phase
from .phase_space import Grid, MarginalDensity, PhaseSpaceState, WignerTerm
from .pulse import Envelope

__all__ = [
    "FockDensity",
    "OperatorDescriptor",
    "Phase",
    "Grid",
    "MarginalDensity",
    "PhaseSpaceState",
    "WignerTerm",
    "Envelope",
]
