"""Time marching from rest until the layers settle into a similarity profile."""
import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Deque, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.errors import InvalidInputError
from src.evolution.scheme import advance
from src.evolution.upwind import dt_bound, upwind_slopes, upwind_terms
from src.model.params import Parameters
from src.model.sources import SourceSpec, sample_source
from src.model.state import LayerState

log = logging.getLogger("silo.fd")

PROGRESS_EVERY = 50_000


@dataclass(frozen=True)
class SchemeConfig:
    cfl_safety: float = 0.4
    exchange_cap_safety: float = 0.5
    stop_epsilon: float = 1e-3
    stop_window: int = 50
    stop_drift: float = 1e-11
    max_steps: int = 5_000_000
    source_sampling: str = "lumped"
    snapshot_every: int = 0

    def __post_init__(self):
        for name in ("cfl_safety", "exchange_cap_safety"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise InvalidInputError(f"{name} must lie in (0, 1], got {value!r}")
        if not 0 < self.stop_epsilon < 1:
            raise InvalidInputError(f"stop_epsilon must lie in (0, 1), got {self.stop_epsilon!r}")
        if self.stop_drift <= 0:
            raise InvalidInputError(f"stop_drift must be positive, got {self.stop_drift!r}")
        if self.stop_window < 1 or self.max_steps < 1:
            raise InvalidInputError("stop_window and max_steps must be >= 1")
        if self.source_sampling not in ("nodal", "lumped"):
            raise InvalidInputError(f"unknown source sampling {self.source_sampling!r}")
        if self.snapshot_every < 0:
            raise InvalidInputError(f"snapshot_every must be >= 0, got {self.snapshot_every!r}")


class RateSample(NamedTuple):
    """Spread of the node-wise growth rate of u after one step."""

    t: float
    low: float
    high: float
    mean: float


def detect_similarity(history: Sequence[RateSample], cfg: SchemeConfig) -> Tuple[bool, float]:
    """Return (converged, c_obs) over the last ``stop_window`` samples.

    Converged means every sample in the window has a positive mean rate and a
    node-wise spread within stop_epsilon of it, and the mean rate drifts by
    at most stop_drift·rate per unit time across the window.
    """
    window = list(history)[-cfg.stop_window:]
    if len(window) < cfg.stop_window:
        return False, math.nan
    means = np.array([s.mean for s in window])
    c_obs = float(means.mean())
    if np.any(means <= 0):
        return False, c_obs
    spread = np.array([s.high - s.low for s in window])
    if np.any(spread > cfg.stop_epsilon * means):
        return False, c_obs
    first, last = window[0], window[-1]
    elapsed = last.t - first.t
    if elapsed > 0 and abs(last.mean - first.mean) / elapsed > cfg.stop_drift * c_obs:
        return False, c_obs
    return True, c_obs


@dataclass(frozen=True)
class RunReport:
    state: LayerState          # absolute layers at the last step
    u_shifted: np.ndarray      # u^d, min 0
    v: np.ndarray              # v^d
    steps: int
    c_obs: float
    converged: bool
    defects: np.ndarray        # per-step |Δ∫(u+v) − Δt∫f|
    mass_defect_rate: float    # Σ defects / elapsed time
    clipped_mass: float
    injected_mass: float
    slope_max: float

    @property
    def clipped_ratio(self) -> float:
        return self.clipped_mass / self.injected_mass if self.injected_mass > 0 else 0.0


def run(f: SourceSpec, grid, p: Parameters, cfg: Optional[SchemeConfig] = None, u0=None,
        callback: Optional[Callable[[int, LayerState], None]] = None) -> RunReport:
    cfg = cfg or SchemeConfig()
    h = grid.h
    f_nodes = sample_source(f, grid, cfg.source_sampling)
    weights = grid.control_volumes
    injected_rate = float((weights * f_nodes).sum())

    u = np.zeros(grid.shape) if u0 is None else np.array(np.broadcast_to(u0, grid.shape), dtype=float)
    # u is kept relative to a running datum so node differences stay exact on long runs
    datum = float(u.min())
    u -= datum
    v = np.zeros(grid.shape)
    t = 0.0
    snapshots = callback is not None and cfg.snapshot_every > 0
    if snapshots:
        callback(0, LayerState(u + datum, v, t))

    history: Deque[RateSample] = deque(maxlen=cfg.stop_window)
    defects = []
    clipped_mass = injected_mass = 0.0
    converged, c_obs, steps = False, math.nan, 0

    log.info(f"evolution started: shape={grid.shape} h={h:.4g} injected rate={injected_rate:.6g}")
    for steps in range(1, cfg.max_steps + 1):
        terms = upwind_terms(u, v, h)
        dt = dt_bound(float(terms.magnitude.max()), float(v.max()), p, cfg.cfl_safety,
                      cfg.exchange_cap_safety, h)
        out = advance(u, v, f_nodes, p, dt, h, steps, terms)

        gained = float((weights * ((out.u - u) + (out.v - v))).sum())
        defects.append(abs(gained - dt * injected_rate))
        injected_mass += dt * injected_rate
        clipped_mass += float((weights * out.clipped).sum())

        shift = float(out.u.min())
        u = out.u - shift
        datum += shift
        v = out.v
        t += dt
        history.append(RateSample(t, float(out.rates.min()), float(out.rates.max()), float(out.rates.mean())))

        if snapshots and steps % cfg.snapshot_every == 0:
            callback(steps, LayerState(u + datum, v, t))
        if steps % PROGRESS_EVERY == 0:
            log.info(f"step {steps}: t={t:.4g} rate spread [{history[-1].low:.6g}, {history[-1].high:.6g}]")
        if len(history) == cfg.stop_window:
            converged, c_obs = detect_similarity(history, cfg)
            if converged:
                break

    if converged:
        log.info(f"similarity detected after {steps} steps at t={t:.4g}: c_obs={c_obs:.10g}")
    else:
        log.warning(f"no similarity profile after {steps} steps (t={t:.4g})")

    slope_max = float(upwind_slopes(u, h).max())
    return RunReport(
        state=LayerState(u + datum, v, t),
        u_shifted=u - u.min(),
        v=v.copy(),
        steps=steps,
        c_obs=c_obs,
        converged=converged,
        defects=np.array(defects),
        mass_defect_rate=float(np.sum(defects)) / t if t > 0 else 0.0,
        clipped_mass=clipped_mass,
        injected_mass=injected_mass,
        slope_max=slope_max,
    )
