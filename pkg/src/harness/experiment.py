"""Grid-refinement studies: FE similarity profiles against FD asymptotics and closed forms."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

import config
from src.errors import InvalidInputError, SiloError
from src.evolution.runner import RunReport, run
from src.harness.settings import ExperimentConfig
from src.model.state import LayerState, SimilarityPair
from src.similarity.discrete import DiscreteSimilarity, discrete_similarity
from src.similarity.exact import RadialProfile, example2_radial, similarity_1d_exact
from src.storage.export import export_profiles, export_snapshots, write_runs, write_table
from src.storage.layout import create_output_tree

log = logging.getLogger("silo.harness")

EXACT = "exact"
MISSING = "missing"

Order = Union[float, str]


# ----------------------- Orders ------------------------

def observed_order(errs: Sequence[float], hs: Sequence[float]) -> List[Order]:
    """log(e_j/e_{j+1}) / log(h_j/h_{j+1}) for consecutive pairs; "exact" where an error vanishes."""
    if len(errs) != len(hs) or len(errs) < 2:
        raise InvalidInputError(f"need matching error and grid lists of length >= 2, got {len(errs)} and {len(hs)}")
    if any(e < 0 for e in errs):
        raise InvalidInputError(f"errors must be non-negative, got {list(errs)}")
    orders: List[Order] = []
    for (e0, e1), (h0, h1) in zip(zip(errs, errs[1:]), zip(hs, hs[1:])):
        if e0 == 0 or e1 == 0:
            orders.append(EXACT)
        else:
            orders.append(math.log(e0 / e1) / math.log(h0 / h1))
    return orders


def table_columns(dim: int, mode: str) -> Tuple[str, ...]:
    if dim == 1:
        return {
            "similarity": ("err_u_fe", "err_v_fe"),
            "evolve": ("err_u_fd", "err_v_fd"),
            "compare": ("err_u_fe", "err_u_fd", "err_v_fe", "err_v_fd"),
        }[mode]
    return ("err_u", "err_v") if mode == "compare" else ()


@dataclass
class ErrorTable:
    """Sup-norm errors per grid size; a row without errors is a missing row."""

    columns: Tuple[str, ...]
    hs: List[float] = field(default_factory=list)
    errors: List[Optional[Dict[str, float]]] = field(default_factory=list)

    def add_row(self, h: float, errors: Optional[Dict[str, float]]) -> None:
        self.hs.append(h)
        self.errors.append(errors)

    def column(self, name: str) -> List[Optional[float]]:
        return [None if row is None else row[name] for row in self.errors]

    def orders(self, name: str) -> List[Optional[Order]]:
        """Order between rows j-1 and j sits on row j; the first row has none."""
        values = self.column(name)
        orders: List[Optional[Order]] = [None]
        for j in range(1, len(values)):
            if values[j - 1] is None or values[j] is None:
                orders.append(MISSING)
            else:
                orders.append(observed_order(values[j - 1:j + 1], self.hs[j - 1:j + 1])[0])
        return orders

    def to_frame(self) -> pd.DataFrame:
        data: Dict[str, list] = {"h": [_cell(h) for h in self.hs]}
        for name in self.columns:
            data[name] = [MISSING if e is None else _cell(e) for e in self.column(name)]
        for name in self.columns:
            data[f"order_{name}"] = ["" if o is None else _cell(o) for o in self.orders(name)]
        return pd.DataFrame(data)


def _cell(value) -> str:
    return value if isinstance(value, str) else f"{value:.17g}"


# ----------------------- Rows --------------------------

@dataclass
class RowResult:
    h: float
    nodes: int
    exact: Optional[SimilarityPair] = None
    radial: Optional[RadialProfile] = None
    fe: Optional[DiscreteSimilarity] = None
    fd: Optional[RunReport] = None
    errors: Optional[Dict[str, float]] = None
    alarms: List[str] = field(default_factory=list)
    failure: Optional[str] = None

    def record(self) -> dict:
        fe, fd = self.fe, self.fd
        return {
            "h": self.h,
            "nodes": self.nodes,
            "status": "ok" if self.failure is None else MISSING,
            "c_exact": _exact_rate(self),
            "c_fe": fe.pair.c if fe is not None else math.nan,
            "fe_iterations": fe.potential.iterations if fe is not None else -1,
            "fe_residual": fe.potential.residual_norm if fe is not None else math.nan,
            "fe_relative_residual": fe.potential.relative_residual if fe is not None else math.nan,
            "c_obs": fd.c_obs if fd is not None else math.nan,
            "converged": fd.converged if fd is not None else "",
            "fd_steps": fd.steps if fd is not None else -1,
            "fd_time": fd.state.t if fd is not None else math.nan,
            "slope_max": fd.slope_max if fd is not None else math.nan,
            "clipped_ratio": fd.clipped_ratio if fd is not None else math.nan,
            "mass_defect_rate": fd.mass_defect_rate if fd is not None else math.nan,
            "alarms": "; ".join(self.alarms),
            "failure": self.failure or "",
        }


def _exact_rate(row: RowResult) -> float:
    if row.exact is not None:
        return row.exact.c
    return row.radial.c if row.radial is not None else math.nan


def sup_errors(dim: int, mode: str, exact: Optional[SimilarityPair], fe: Optional[SimilarityPair],
               fd: Optional[RunReport]) -> Dict[str, float]:
    """Max-norm distances between the min-shifted profiles a mode produces."""
    def dist(a, b) -> float:
        return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))

    errors = {}
    if dim == 1:
        if exact is None:
            return errors
        if fe is not None:
            errors["err_u_fe"] = dist(exact.U, fe.U)
            errors["err_v_fe"] = dist(exact.V, fe.V)
        if fd is not None:
            errors["err_u_fd"] = dist(exact.U, fd.u_shifted)
            errors["err_v_fd"] = dist(exact.V, fd.v)
    elif mode == "compare":
        errors["err_u"] = dist(fe.U, fd.u_shifted)
        errors["err_v"] = dist(fe.V, fd.v)
    return errors


def check_alarms(report: RunReport, h: float) -> List[str]:
    alarms = []
    if report.clipped_ratio > config.CLIP_ALARM:
        alarms.append(f"clipped mass ratio {report.clipped_ratio:.3e} exceeds {config.CLIP_ALARM:.1e}")
    if report.mass_defect_rate / h > config.MASS_ALARM:
        alarms.append(f"mass defect rate {report.mass_defect_rate:.3e} exceeds {config.MASS_ALARM:g}*h")
    if not report.converged:
        alarms.append(f"no similarity profile detected within {report.steps} steps")
    for alarm in alarms:
        log.warning(f"h={h:.6g}: {alarm}")
    return alarms


def run_row(cfg: ExperimentConfig, h: float, mode: str, directory: Optional[Path] = None) -> RowResult:
    grid = cfg.grid(h)
    row = RowResult(h, grid.node_count)
    snapshots: List[Tuple[int, LayerState]] = []
    try:
        if cfg.radial:
            R = cfg.lengths[0]
            row.radial = example2_radial(R, cfg.params, cfg.source.total_mass / (math.pi * R ** 2), grid.r)
        elif cfg.dim == 1 and cfg.source.total_mass > 0:
            row.exact = similarity_1d_exact(cfg.source, grid, cfg.params)
        if mode in ("similarity", "compare") and not cfg.radial:
            row.fe = discrete_similarity(cfg.source, grid, cfg.params)
        if mode in ("evolve", "compare"):
            def keep(step: int, state: LayerState) -> None:
                snapshots.append((step, state))

            wants_snapshots = "snapshots" in cfg.outputs
            row.fd = run(cfg.source, grid, cfg.params, cfg.scheme, callback=keep if wants_snapshots else None)
            row.alarms = check_alarms(row.fd, h)
        row.errors = sup_errors(cfg.dim, mode, row.exact, row.fe and row.fe.pair, row.fd)
        if directory is not None:
            _write_row(cfg, row, grid, directory, snapshots)
    except SiloError as exc:
        log.error(f"{cfg.name}: row h={h:.6g} failed: {exc}")
        row.failure = str(exc)
        row.errors = None
    else:
        log.info(f"{cfg.name}: row h={h:.6g} finished {row.errors or ''}")
    return row


def _write_row(cfg: ExperimentConfig, row: RowResult, grid, directory: Path,
               snapshots: Sequence[Tuple[int, LayerState]]) -> None:
    fields: Dict[str, np.ndarray] = {}
    if row.exact is not None:
        fields.update(u_exact=row.exact.U, v_exact=row.exact.V)
    if row.radial is not None:
        fields.update(u_exact=row.radial.U, v_exact=row.radial.V, slope_exact=row.radial.U_r)
    if row.fe is not None:
        fields.update(u_fe=row.fe.pair.U, v_fe=row.fe.pair.V)
    if row.fd is not None:
        fields.update(u_fd=row.fd.u_shifted, v_fd=row.fd.v)
    if "profiles" in cfg.outputs:
        export_profiles(fields, grid, directory)
    if "errors" in cfg.outputs:
        reference = "exact" if row.exact is not None else "fe"
        diffs = {}
        for method in ("fe", "fd"):
            if method == reference:
                continue
            for layer in ("u", "v"):
                if f"{layer}_{method}" in fields and f"{layer}_{reference}" in fields:
                    diffs[f"err_{layer}_{method}"] = np.abs(fields[f"{layer}_{method}"] - fields[f"{layer}_{reference}"])
        export_profiles(diffs, grid, directory)
    if "snapshots" in cfg.outputs and snapshots:
        export_snapshots(snapshots, grid, directory / "snapshots")


# ----------------------- Experiment --------------------

@dataclass
class ExperimentResult:
    name: str
    mode: str
    table: ErrorTable
    rows: List[RowResult]
    out_dir: Path

    @property
    def alarms(self) -> List[str]:
        return [f"h={row.h:.6g}: {alarm}" for row in self.rows for alarm in row.alarms]

    @property
    def missing(self) -> List[float]:
        return [row.h for row in self.rows if row.failure is not None]


def run_experiment(cfg: ExperimentConfig, mode: Optional[str] = None) -> ExperimentResult:
    mode = mode or cfg.mode
    if mode != cfg.mode:
        cfg = cfg.with_overrides(mode=mode)
    dirs = create_output_tree(cfg.out_dir, cfg.name, cfg.h_list)
    log.info(f"{cfg.name}: {mode} over h={list(cfg.h_list)} with {config.MAX_WORKERS} workers")

    with ThreadPoolExecutor(max_workers=config.MAX_WORKERS) as executor:
        rows = list(executor.map(lambda h: run_row(cfg, h, mode, dirs[h]), cfg.h_list))

    if cfg.radial:
        columns = ()
    else:
        columns = table_columns(cfg.dim, mode) if cfg.dim == 2 or cfg.source.total_mass > 0 else ()
    table = ErrorTable(columns)
    for row in rows:
        table.add_row(row.h, None if row.errors is None else {c: row.errors[c] for c in table.columns})

    root = Path(cfg.out_dir) / cfg.name
    if "table" in cfg.outputs:
        write_table(table.to_frame(), root / "table.csv")
        write_runs((row.record() for row in rows), root / "runs.csv")
    result = ExperimentResult(cfg.name, mode, table, rows, root)
    if result.missing:
        log.warning(f"{cfg.name}: missing rows for h={result.missing}")
    return result
