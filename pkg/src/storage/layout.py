from pathlib import Path
from typing import Dict, Sequence

from src.errors import StorageError


def row_dirname(h: float) -> str:
    return f"h_{h:.6g}"


def create_output_tree(out_dir, name: str, h_list: Sequence[float]) -> Dict[float, Path]:
    """Create <out_dir>/<name>/h_<h>/ for every grid size, if missing."""
    root = Path(out_dir) / name
    rows = {h: root / row_dirname(h) for h in h_list}
    for path in rows.values():
        try:
            path.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageError(path, exc) from exc
    return rows
