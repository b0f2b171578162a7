"""
Protocol request schemas.
"""

from enum import Enum
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from domain.entities.operators import Phase


class InputKind(str, Enum):
    """Optical input state of each pulse."""

    SINGLE_PHOTON = "single_photon"
    COHERENT = "coherent"


class CatBranch(str, Enum):
    """Named cat schedule: (0,1) clicks with phases 2πj/N, or (1,0) clicks with +π."""

    CLICK01 = "click01"
    CLICK10 = "click10"

    @property
    def outcome(self) -> Tuple[int, int]:
        return (0, 1) if self is CatBranch.CLICK01 else (1, 0)


class PhaseOrdering(str, Enum):
    """Where the zero phase sits in the cat schedule."""

    FORMULA = "formula"  # φ_j = 2πj/N, j = 1..N
    ZERO_FIRST = "zero_first"  # φ_j = 2π(j-1)/N


class ProtocolConfig(BaseModel):
    """Full description of one protocol run.

    Phases given as numbers are radians; strings such as "2/5" are exact
    fractions of a full turn. When phases or clicks are omitted the cat schedule
    of ``branch``/``ordering`` is used.
    """

    steps: int = Field(..., ge=1, le=64, description="Number of pulses N")
    coupling: float = Field(..., gt=0, description="Coupling μ in zero-point momentum units")
    initial_occupation: float = Field(0.0, ge=0, description="Initial thermal occupation n̄")
    phases: Optional[List[Union[float, str]]] = Field(None, description="Interferometer phases φ_j")
    click_sequence: Optional[List[Tuple[int, int]]] = Field(None, description="Click outcomes (m_j, n_j)")
    input_kind: InputKind = Field(InputKind.SINGLE_PHOTON, description="Optical input state")
    alpha: complex = Field(complex(1 / 2**0.5, 0), description="Coherent amplitude α")
    efficiency: float = Field(1.0, gt=0, le=1, description="Detection efficiency η")
    per_step_thermal: float = Field(0.0, ge=0, description="Phonons added per step n̄_th")
    branch: CatBranch = Field(CatBranch.CLICK01, description="Cat schedule preset")
    ordering: PhaseOrdering = Field(PhaseOrdering.FORMULA, description="Cat phase ordering")

    @field_validator("phases")
    def validate_phases(cls, v):
        if v is not None:
            for phase in v:
                Phase.parse(phase)
        return v

    @field_validator("click_sequence")
    def validate_clicks(cls, v):
        if v is not None:
            for m, n in v:
                if m < 0 or n < 0:
                    raise ValueError("click counts must be nonnegative")
        return v

    @model_validator(mode="after")
    def validate_lengths(self):
        if self.phases is not None and len(self.phases) != self.steps:
            raise ValueError(f"phases has {len(self.phases)} entries but steps is {self.steps}")
        if self.click_sequence is not None:
            if len(self.click_sequence) != self.steps:
                raise ValueError(
                    f"click_sequence has {len(self.click_sequence)} entries but steps is {self.steps}"
                )
            if self.input_kind is InputKind.SINGLE_PHOTON:
                for outcome in self.click_sequence:
                    if tuple(outcome) not in {(0, 1), (1, 0)}:
                        raise ValueError(
                            f"single_photon input only heralds (0,1) or (1,0), got {tuple(outcome)}"
                        )
        return self

    def outcomes(self) -> List[Tuple[int, int]]:
        if self.click_sequence is not None:
            return [tuple(c) for c in self.click_sequence]
        return [self.branch.outcome] * self.steps

    @property
    def uses_cat_schedule(self) -> bool:
        return self.phases is None and self.click_sequence is None
