"""
Parameter repository for reading run configurations from disk.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Type, TypeVar, Union

import numpy as np
import yaml
from pydantic import BaseModel

from core.config import settings
from core.logging import get_logger
from domain.models.exceptions import ArtifactIOError
from domain.models.requests.pulse import CavityParams, EnvelopeKind
from domain.models.requests.table import Table1Spec

ModelType = TypeVar("ModelType", bound=BaseModel)

DEFAULT_TABLE1 = Path(__file__).resolve().parents[2] / "data" / "table1.yaml"


class ParameterRepository:
    """Repository for JSON/YAML parameter files and envelope tables."""

    def __init__(self, base_dir: Optional[Union[str, Path]] = None):
        self.base_dir = Path(base_dir) if base_dir else None
        self.logger = get_logger(__name__)

    def _resolve(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        if self.base_dir is not None and not path.is_absolute():
            path = self.base_dir / path
        return path

    def load_mapping(self, path: Union[str, Path]) -> Dict[str, Any]:
        """
        Read a JSON or YAML mapping, chosen by file suffix.

        Raises:
            ArtifactIOError: if the file cannot be read or parsed
        """
        path = self._resolve(path)
        try:
            text = path.read_text(encoding="utf-8")
            if path.suffix.lower() == ".json":
                data = json.loads(text)
            else:
                data = yaml.safe_load(text)
        except (OSError, json.JSONDecodeError, yaml.YAMLError) as e:
            raise ArtifactIOError(f"cannot read parameters from {path}: {e}") from e
        if not isinstance(data, dict):
            raise ArtifactIOError(f"{path} does not contain a mapping")
        self.logger.debug("Parameters loaded", path=str(path), keys=sorted(data))
        return data

    def load_model(self, path: Union[str, Path], model: Type[ModelType]) -> ModelType:
        """Read a file and validate it against a pydantic model."""
        return model.model_validate(self.load_mapping(path))

    def load_table1(self, path: Optional[Union[str, Path]] = None) -> Table1Spec:
        """Table parameter sets; defaults to the embedded data file."""
        path = path or settings.table1_path or DEFAULT_TABLE1
        return self.load_model(path, Table1Spec)

    def load_envelope_samples(self, path: Union[str, Path]) -> List[Tuple[float, float, float]]:
        """
        Read t,re[,im] rows from a CSV file; a header line is skipped.

        Raises:
            ArtifactIOError: if the file is missing or malformed
        """
        path = self._resolve(path)
        try:
            table = np.loadtxt(path, delimiter=",", comments="#", ndmin=2, skiprows=self._header_rows(path))
        except (OSError, ValueError) as e:
            raise ArtifactIOError(f"cannot read envelope table {path}: {e}") from e
        if table.shape[1] not in (2, 3):
            raise ArtifactIOError(f"{path} must have 2 or 3 columns, found {table.shape[1]}")
        if table.shape[1] == 2:
            table = np.column_stack([table, np.zeros(len(table))])
        return [tuple(map(float, row)) for row in table]

    def load_cavity(self, path: Union[str, Path]) -> CavityParams:
        """Cavity parameters, pulling tabulated envelopes in from their CSV files."""
        params = self.load_model(path, CavityParams)
        envelope = params.envelope
        if envelope.kind is EnvelopeKind.TABLE and envelope.samples is None:
            samples = self.load_envelope_samples(envelope.table_path)
            params = params.model_copy(update={"envelope": envelope.model_copy(update={"samples": samples})})
        return params

    @staticmethod
    def _header_rows(path: Path) -> int:
        try:
            with path.open(encoding="utf-8") as handle:
                first = handle.readline().strip()
            if first.startswith("#"):
                return 0
        except OSError as e:
            raise ArtifactIOError(f"cannot read envelope table {path}: {e}") from e
        try:
            [float(v) for v in first.split(",") if v]
            return 0
        except ValueError:
            return 1
