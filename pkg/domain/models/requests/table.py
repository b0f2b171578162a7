"""
Parameter-set file schemas for table reproduction.
"""

from typing import Dict, List

from pydantic import BaseModel, Field, field_validator

from domain.models.requests.device import DeviceParams

TABLE_COLUMNS = ("per_step_thermal", "total_time", "min_w", "delta", "lee_jeong", "macroscopicity")


class ExpectedValue(BaseModel):
    """A printed value with its comparison tolerance."""

    value: float
    tolerance: float = Field(..., gt=0)
    relative: bool = False

    def accepts(self, computed: float) -> bool:
        scale = abs(self.value) if self.relative else 1.0
        return abs(computed - self.value) <= self.tolerance * scale


class Table1Entry(BaseModel):
    device: DeviceParams
    expected: Dict[str, ExpectedValue] = Field(default_factory=dict)

    @field_validator("expected")
    def validate_columns(cls, v):
        unknown = set(v) - set(TABLE_COLUMNS)
        if unknown:
            raise ValueError(f"unknown table columns: {sorted(unknown)}")
        return v


class Table1Spec(BaseModel):
    """Rows of device parameters plus the run-count convention."""

    runs: int = Field(1000, ge=1)
    rows: List[Table1Entry] = Field(..., min_length=1)
