"""CSV and manifest ingestion with convergence filtering."""

from __future__ import annotations

import csv
import json
from pathlib import Path


class FigureDataError(ValueError):
    """Unusable input data (missing file/columns, nothing converged)."""


def load_table(path: str | Path, required: tuple[str, ...],
               drop_unconverged: bool = True) -> dict:
    """Read a photon-engine CSV into columns of floats.

    Rows flagged unconverged are dropped when drop_unconverged is set; an
    empty result after filtering is an error, not a blank figure.
    """
    path = Path(path)
    if not path.exists():
        raise FigureDataError(f"input file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise FigureDataError(f"{path} is empty")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise FigureDataError(
                f"{path} lacks required columns {missing}; has {reader.fieldnames}")
        rows = list(reader)
    if drop_unconverged and "converged" in (reader.fieldnames or []):
        rows = [r for r in rows if r.get("converged") == "1"]
    if not rows:
        raise FigureDataError(f"{path}: no converged rows to plot")
    table: dict = {}
    for col in reader.fieldnames:
        try:
            table[col] = [float(r[col]) for r in rows]
        except (TypeError, ValueError) as exc:
            raise FigureDataError(f"{path}: non-numeric value in column "
                                  f"{col!r}") from exc
    return table


def load_manifest(csv_path: str | Path,
                  manifest_path: str | Path | None = None) -> dict:
    """Manifest sidecar of a CSV output; empty dict if absent."""
    if manifest_path is None:
        manifest_path = Path(csv_path).with_suffix(".manifest.json")
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        return {}
    try:
        return json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise FigureDataError(f"cannot parse manifest {manifest_path}: {exc}")
