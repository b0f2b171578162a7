"""
Response schemas for reports and API output serialization.
"""

from .heralding import FeasibilityResult, HeraldReport
from .measures import MeasureReport
from .oracle import LossCheck, OracleCell, OracleCheckReport
from .pulse import PulseCouplingResponse
from .table import CellCheck, OptimalStep, SweepPoint, SweepReport, Table1Report, Table1Row

__all__ = [
    "FeasibilityResult",
    "HeraldReport",
    "MeasureReport",
    "LossCheck",
    "OracleCell",
    "OracleCheckReport",
    "PulseCouplingResponse",
    "CellCheck",
    "OptimalStep",
    "SweepPoint",
    "SweepReport",
    "Table1Report",
    "Table1Row",
]
