"""
Artifact repository for writing fields, tables and plots.
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from pydantic import BaseModel  # noqa: E402

from core.logging import get_logger, log_artifact_write  # noqa: E402
from domain.entities.phase_space import Grid  # noqa: E402
from domain.models.exceptions import ArtifactIOError  # noqa: E402

FLOAT_FORMAT = "%.12e"


def _format(value: Any) -> str:
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    return str(value)


def to_jsonable(payload: Any) -> Any:
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json")
    if isinstance(payload, dict):
        return {str(k): to_jsonable(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [to_jsonable(v) for v in payload]
    if isinstance(payload, np.ndarray):
        return payload.tolist()
    if isinstance(payload, np.generic):
        return payload.item()
    if isinstance(payload, complex):
        return {"re": payload.real, "im": payload.imag}
    return payload


class ArtifactRepository:
    """Repository for run outputs under one directory.

    Writes are deterministic: fixed float formatting, sorted JSON keys and
    row-major X-outer/P-inner ordering of grid samples.
    """

    def __init__(self, output_dir: Union[str, Path]):
        self.output_dir = Path(output_dir)
        self.logger = get_logger(__name__)

    def path_for(self, name: str) -> Path:
        return self.output_dir / name

    def _prepare(self, name: str) -> Path:
        path = self.path_for(name)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ArtifactIOError(f"cannot create {path.parent}: {e}") from e
        return path

    def _written(self, kind: str, path: Path, **context) -> Path:
        log_artifact_write(self.logger, kind=kind, path=str(path), size=path.stat().st_size, **context)
        return path

    def write_wigner_csv(self, name: str, grid: Grid, field: np.ndarray, metadata: Mapping[str, Any]) -> Path:
        """
        Write a "# key: value" header followed by x,p,w rows.

        Raises:
            ArtifactIOError: on any filesystem error
        """
        path = self._prepare(name)
        xs, ps = np.meshgrid(grid.x, grid.p, indexing="ij")
        rows = np.column_stack([xs.reshape(-1), ps.reshape(-1), np.asarray(field, dtype=float).reshape(-1)])
        header = "\n".join(f"# {key}: {json.dumps(to_jsonable(value), sort_keys=True)}" for key, value in sorted(metadata.items()))
        try:
            with path.open("w", encoding="utf-8", newline="\n") as handle:
                if header:
                    handle.write(header + "\n")
                handle.write("x,p,w\n")
                np.savetxt(handle, rows, delimiter=",", fmt=FLOAT_FORMAT)
        except OSError as e:
            raise ArtifactIOError(f"cannot write {path}: {e}") from e
        return self._written("csv", path, points=int(rows.shape[0]))

    def write_wigner_bin(self, name: str, grid: Grid, field: np.ndarray, metadata: Mapping[str, Any]) -> Path:
        """Little-endian float64 array [nx, np] with a JSON sidecar holding the grid and metadata."""
        path = self._prepare(name)
        sidecar = path.with_suffix(path.suffix + ".json")
        try:
            np.ascontiguousarray(field, dtype="<f8").tofile(path)
            sidecar.write_text(
                json.dumps(
                    {"grid": grid.to_dict(), "dtype": "<f8", "order": "C", "metadata": to_jsonable(dict(metadata))},
                    sort_keys=True,
                    indent=2,
                ),
                encoding="utf-8",
            )
        except OSError as e:
            raise ArtifactIOError(f"cannot write {path}: {e}") from e
        self._written("json", sidecar)
        return self._written("bin", path, shape=list(np.shape(field)))

    def write_json(self, name: str, payload: Any) -> Path:
        path = self._prepare(name)
        try:
            path.write_text(json.dumps(to_jsonable(payload), sort_keys=True, indent=2) + "\n", encoding="utf-8")
        except OSError as e:
            raise ArtifactIOError(f"cannot write {path}: {e}") from e
        return self._written("json", path)

    def write_rows_csv(self, name: str, rows: Iterable[Mapping[str, Any]], metadata: Optional[Mapping[str, Any]] = None) -> Path:
        """Write dict rows; columns are the union of keys in first-seen order."""
        rows = list(rows)
        columns: List[str] = []
        for row in rows:
            columns.extend(k for k in row if k not in columns)
        path = self._prepare(name)
        try:
            with path.open("w", encoding="utf-8", newline="\n") as handle:
                for key, value in sorted((metadata or {}).items()):
                    handle.write(f"# {key}: {json.dumps(to_jsonable(value), sort_keys=True)}\n")
                handle.write(",".join(columns) + "\n")
                for row in rows:
                    handle.write(",".join(_format(row.get(c, "")) for c in columns) + "\n")
        except OSError as e:
            raise ArtifactIOError(f"cannot write {path}: {e}") from e
        return self._written("csv", path, rows=len(rows))

    def write_slice_csv(self, name: str, axis: str, coordinates: np.ndarray, values: np.ndarray, metadata: Mapping[str, Any]) -> Path:
        rows = [{axis: float(c), "w": float(v)} for c, v in zip(coordinates, values)]
        return self.write_rows_csv(name, rows, metadata)

    def write_heatmap(self, name: str, grid: Grid, field: np.ndarray, title: str = "") -> Path:
        """Viridis heat map of W with X horizontal and P vertical."""
        path = self._prepare(name)
        fig, ax = plt.subplots(figsize=(5, 5), dpi=120)
        try:
            image = ax.imshow(
                np.asarray(field).T,
                origin="lower",
                extent=(grid.x_min, grid.x_max, grid.p_min, grid.p_max),
                cmap="viridis",
                aspect="auto",
            )
            fig.colorbar(image, ax=ax, label="W")
            ax.set_xlabel("X")
            ax.set_ylabel("P")
            if title:
                ax.set_title(title)
            fig.savefig(path, metadata={"Software": None})
        except OSError as e:
            raise ArtifactIOError(f"cannot write {path}: {e}") from e
        finally:
            plt.close(fig)
        return self._written("png", path)

    def write_series_plot(self, name: str, series: Dict[str, Dict[int, float]], measure: str, title: str = "") -> Path:
        """Line plot of a measure against N, one line per labelled series."""
        path = self._prepare(name)
        fig, ax = plt.subplots(figsize=(6, 4), dpi=120)
        try:
            for label, values in sorted(series.items()):
                steps = sorted(values)
                ax.plot(steps, [values[n] for n in steps], marker="o", label=label)
            ax.set_xlabel("N")
            ax.set_ylabel(measure)
            if title:
                ax.set_title(title)
            ax.legend(fontsize="small")
            fig.savefig(path, metadata={"Software": None})
        except OSError as e:
            raise ArtifactIOError(f"cannot write {path}: {e}") from e
        finally:
            plt.close(fig)
        return self._written("png", path)
