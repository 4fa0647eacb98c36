"""CSV writers for profiles, snapshot series and error tables."""
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd

from src.errors import InvalidInputError, StorageError
from src.model.grids import RadialGrid
from src.model.state import LayerState

log = logging.getLogger("silo.storage")

FLOAT_FORMAT = "%.17g"


def _write(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as exc:
        raise StorageError(path, exc) from exc
    return path


def profile_frame(values, grid) -> pd.DataFrame:
    """Long format: ``x,value`` on intervals, ``r,value`` on radial grids and
    ``x,y,value`` row-major (y outer) on rectangles.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise InvalidInputError(f"field shape {values.shape} does not match grid shape {grid.shape}")
    if isinstance(grid, RadialGrid):
        return pd.DataFrame({"r": grid.r, "value": values})
    if grid.dim == 1:
        return pd.DataFrame({"x": grid.x, "value": values})
    return pd.DataFrame({"x": grid.xx.ravel(), "y": grid.yy.ravel(), "value": values.ravel()})


def export_profile(values, grid, path) -> Path:
    return _write(profile_frame(values, grid), path)


def export_profiles(fields: Dict[str, np.ndarray], grid, directory) -> List[Path]:
    directory = Path(directory)
    return [export_profile(values, grid, directory / f"{name}.csv") for name, values in fields.items()]


def export_snapshots(snapshots: Sequence[Tuple[int, LayerState]], grid, directory) -> List[Path]:
    """u_00000.csv, v_00000.csv, ... in order, plus index.csv mapping each file to its step and time."""
    directory = Path(directory)
    paths = []
    for k, (_, state) in enumerate(snapshots):
        paths.append(export_profile(state.u, grid, directory / f"u_{k:05d}.csv"))
        paths.append(export_profile(state.v, grid, directory / f"v_{k:05d}.csv"))
    index = pd.DataFrame({
        "index": range(len(snapshots)),
        "step": [step for step, _ in snapshots],
        "t": [state.t for _, state in snapshots],
    })
    paths.append(_write(index, directory / "index.csv"))
    log.info(f"wrote {len(snapshots)} snapshots to {directory}")
    return paths


def write_table(frame: pd.DataFrame, path) -> Path:
    path = _write(frame, path)
    log.info(f"table written to {path}")
    return path


def write_runs(records: Iterable[dict], path) -> Path:
    return _write(pd.DataFrame(list(records)), path)
