"""
Table reproduction and sweep response schemas.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class CellCheck(BaseModel):
    """One compared value."""

    column: str
    computed: float
    expected: float
    tolerance: float
    relative: bool = False
    passed: bool


class Table1Row(BaseModel):
    label: str
    per_step_thermal: float
    total_time: float
    min_w: float
    delta: float
    lee_jeong: float
    macroscopicity: float
    checks: List[CellCheck] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class Table1Report(BaseModel):
    rows: List[Table1Row]
    passed: bool


class SweepPoint(BaseModel):
    """Measures at one sweep point."""

    steps: int
    coupling: float
    per_step_thermal: float
    initial_occupation: float
    min_w: float
    delta: float
    lee_jeong: float
    macroscopicity: float
    optimal_lambda: float


class OptimalStep(BaseModel):
    """Step number maximizing a measure along one sweep series."""

    coupling: float
    per_step_thermal: float
    initial_occupation: float
    measure: str
    steps: int
    value: float


class SweepReport(BaseModel):
    points: List[SweepPoint]
    optimal_steps: List[OptimalStep] = Field(default_factory=list)
    metadata: Dict[str, object] = Field(default_factory=dict)
    plot_files: Optional[List[str]] = None
