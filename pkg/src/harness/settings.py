"""Experiment files: one experiment per dotenv-style file with dotted keys.

    name=centered_patch
    mode=compare
    domain.kind=interval
    domain.lx=1
    grid.h_list=0.01,0.005
    source.patch.1=interval 0.45 0.55 1
    scheme.stop_drift=1e-8
    outputs=profiles,table

experiments/README.md lists every key.
"""
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from dotenv import dotenv_values

import config
from src.errors import ConfigError, InvalidInputError
from src.evolution.runner import SchemeConfig
from src.model.grids import Grid1D, Grid2D, RadialGrid
from src.model.params import Parameters
from src.model.sources import Atom, Disk, Interval, Patch, Rectangle, SourceSpec

log = logging.getLogger("silo.harness")

MODES = ("similarity", "evolve", "compare")
OUTPUTS = ("profiles", "errors", "table", "snapshots")
DOMAIN_KINDS = ("interval", "rectangle", "disk")

SCALAR_KEYS = {
    "name", "mode", "domain.kind", "domain.lx", "domain.ly", "grid.h_list",
    "params.alpha", "params.beta", "params.gamma", "outputs", "out_dir", "snapshot_every",
    "scheme.cfl_safety", "scheme.exchange_cap_safety", "scheme.stop_epsilon", "scheme.stop_window",
    "scheme.stop_drift", "scheme.max_steps", "scheme.source_sampling",
}
SCHEME_TYPES = {
    "cfl_safety": float, "exchange_cap_safety": float, "stop_epsilon": float,
    "stop_window": int, "stop_drift": float, "max_steps": int, "source_sampling": str,
}


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    lengths: Tuple[float, ...]
    h_list: Tuple[float, ...]
    source: SourceSpec
    params: Parameters = field(default_factory=Parameters)
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    outputs: FrozenSet[str] = frozenset({"table"})
    out_dir: str = config.OUT_DIR
    mode: str = "compare"
    domain: str = "interval"

    def __post_init__(self):
        if self.domain not in DOMAIN_KINDS:
            raise ConfigError("domain.kind", f"expected one of {', '.join(DOMAIN_KINDS)}, got {self.domain!r}")
        if self.mode not in MODES:
            raise ConfigError("mode", f"expected one of {', '.join(MODES)}, got {self.mode!r}")
        if not self.h_list:
            raise ConfigError("grid.h_list", "at least one grid size is required")
        if any(a <= b for a, b in zip(self.h_list, self.h_list[1:])):
            raise ConfigError("grid.h_list", f"grid sizes must be strictly decreasing, got {list(self.h_list)}")
        if not self.outputs:
            raise ConfigError("outputs", "at least one output is required")
        unknown = set(self.outputs) - set(OUTPUTS)
        if unknown:
            raise ConfigError("outputs", f"unknown outputs {sorted(unknown)}")
        if "snapshots" in self.outputs and self.scheme.snapshot_every <= 0:
            raise ConfigError("snapshot_every", "snapshots need a positive snapshot_every")
        if self.radial:
            self._check_disk()
        else:
            try:
                self.source.check_domain(self.lengths)
            except InvalidInputError as exc:
                raise ConfigError("source", str(exc)) from exc
        for h in self.h_list:
            try:
                self.grid(h)
            except InvalidInputError as exc:
                raise ConfigError("grid.h_list", str(exc)) from exc
        if self.mode != "evolve" and self.source.total_mass <= 0:
            raise ConfigError("source", "similarity profiles need a source with positive mass")

    def _check_disk(self) -> None:
        if self.mode != "similarity":
            raise ConfigError("mode", "a disk only has the closed-form similarity profile, use mode=similarity")
        if self.source.patches or any(set(a.location) != {0.0} or a.dim != 2 for a in self.source.atoms):
            raise ConfigError("source", "a disk takes point masses at its center, written source.atom.<n>=0 0 m")

    @property
    def radial(self) -> bool:
        return self.domain == "disk"

    @property
    def dim(self) -> int:
        return 2 if self.radial else len(self.lengths)

    def grid(self, h: float):
        if self.radial:
            return RadialGrid.from_spacing(self.lengths[0], h)
        if self.dim == 1:
            return Grid1D.from_spacing(self.lengths[0], h)
        return Grid2D.from_spacing(self.lengths[0], self.lengths[1], h)

    def with_overrides(self, out_dir: Optional[str] = None, h_list: Optional[Sequence[float]] = None,
                       max_steps: Optional[int] = None, mode: Optional[str] = None) -> "ExperimentConfig":
        changes: Dict[str, object] = {}
        if out_dir is not None:
            changes["out_dir"] = out_dir
        if h_list is not None:
            changes["h_list"] = tuple(h_list)
        if max_steps is not None:
            try:
                changes["scheme"] = replace(self.scheme, max_steps=max_steps)
            except InvalidInputError as exc:
                raise ConfigError("scheme.max_steps", str(exc)) from exc
        if mode is not None:
            changes["mode"] = mode
        return replace(self, **changes) if changes else self


# ----------------------- Parsing -----------------------

def _number(key: str, raw: Optional[str], kind=float):
    if raw is None or not raw.strip():
        raise ConfigError(key, "value is missing")
    try:
        return kind(raw.strip())
    except ValueError:
        raise ConfigError(key, f"expected {kind.__name__}, got {raw!r}") from None


def parse_h_list(raw: str, key: str = "grid.h_list") -> Tuple[float, ...]:
    return tuple(_number(key, part) for part in raw.split(",") if part.strip())


def _parse_patch(key: str, raw: str) -> Patch:
    kind, *numbers = raw.split()
    values = [_number(key, n) for n in numbers]
    shapes = {"interval": (Interval, 2), "rect": (Rectangle, 4), "disk": (Disk, 3)}
    if kind not in shapes:
        raise ConfigError(key, f"unknown patch shape {kind!r} (expected interval, rect or disk)")
    region_type, arity = shapes[kind]
    if len(values) != arity + 1:
        raise ConfigError(key, f"{kind} patch takes {arity} coordinates and an intensity, got {raw!r}")
    try:
        return Patch(region_type(*values[:-1]), values[-1])
    except InvalidInputError as exc:
        raise ConfigError(key, str(exc)) from exc


def _parse_atom(key: str, raw: str) -> Atom:
    values = [_number(key, n) for n in raw.split()]
    if len(values) not in (2, 3):
        raise ConfigError(key, f"atom takes coordinates and a mass, got {raw!r}")
    try:
        return Atom(tuple(values[:-1]), values[-1])
    except InvalidInputError as exc:
        raise ConfigError(key, str(exc)) from exc


def _ordered(entries: Dict[str, str], prefix: str) -> List[Tuple[str, str]]:
    keys = [k for k in entries if k.startswith(prefix)]
    return sorted(((k, entries[k]) for k in keys), key=lambda kv: (len(kv[0]), kv[0]))


def parse_experiment(entries: Dict[str, Optional[str]], default_name: str = "experiment") -> ExperimentConfig:
    entries = {k.strip(): (v or "").strip() for k, v in entries.items()}
    for key in entries:
        if key not in SCALAR_KEYS and not key.startswith(("source.patch.", "source.atom.")):
            raise ConfigError(key, "unknown key")

    kind = entries.get("domain.kind", "interval")
    if kind not in DOMAIN_KINDS:
        raise ConfigError("domain.kind", f"expected interval, rectangle or disk, got {kind!r}")
    # the radius of a disk is read from domain.lx
    lx = _number("domain.lx", entries.get("domain.lx", "1"))
    lengths = (lx,) if kind != "rectangle" else (lx, _number("domain.ly", entries.get("domain.ly", str(lx))))
    if min(lengths) <= 0:
        raise ConfigError("domain.lx", f"domain lengths must be positive, got {lengths}")

    if "grid.h_list" not in entries:
        raise ConfigError("grid.h_list", "value is missing")
    h_list = parse_h_list(entries["grid.h_list"])

    try:
        params = Parameters(**{name: _number(f"params.{name}", entries[f"params.{name}"])
                               for name in ("alpha", "beta", "gamma") if f"params.{name}" in entries})
    except InvalidInputError as exc:
        raise ConfigError("params", str(exc)) from exc

    patches = tuple(_parse_patch(k, v) for k, v in _ordered(entries, "source.patch."))
    atoms = tuple(_parse_atom(k, v) for k, v in _ordered(entries, "source.atom."))
    if not patches and not atoms:
        raise ConfigError("source", "at least one source.patch.<n> or source.atom.<n> is required")
    try:
        source = SourceSpec(patches, atoms)
    except InvalidInputError as exc:
        raise ConfigError("source", str(exc)) from exc

    scheme_values = {}
    for name, kind_ in SCHEME_TYPES.items():
        key = f"scheme.{name}"
        if key in entries:
            scheme_values[name] = entries[key] if kind_ is str else _number(key, entries[key], kind_)
    if "snapshot_every" in entries:
        scheme_values["snapshot_every"] = _number("snapshot_every", entries["snapshot_every"], int)
    elif config.SNAPSHOT_EVERY:
        scheme_values["snapshot_every"] = config.SNAPSHOT_EVERY
    try:
        scheme = SchemeConfig(**scheme_values)
    except InvalidInputError as exc:
        raise ConfigError("scheme", str(exc)) from exc

    outputs = frozenset(o.strip() for o in entries.get("outputs", "table").split(",") if o.strip())
    return ExperimentConfig(
        name=entries.get("name") or default_name,
        lengths=lengths,
        h_list=h_list,
        source=source,
        params=params,
        scheme=scheme,
        outputs=outputs,
        out_dir=entries.get("out_dir") or config.OUT_DIR,
        mode=entries.get("mode", "compare"),
        domain=kind,
    )


def load_experiment(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"no experiment file at {path}")
    cfg = parse_experiment(dotenv_values(path), default_name=path.stem)
    log.info(f"loaded experiment {cfg.name!r} from {path}: {cfg.dim}D, h={list(cfg.h_list)}, mode={cfg.mode}")
    return cfg


def builtin_experiments() -> Dict[str, Path]:
    return {path.stem: path for path in sorted(config.EXPERIMENTS_DIR.glob("*.env"))}
