"""One explicit Euler step of the two-layer system.

    v ← v + Δt(βG − γ(α − |Du|)v + f)
    u ← u + Δt·γ(α − |Du|)v

with |Du| the drop from each node towards its lower neighbours.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import InvalidInputError, NonFiniteStateError
from src.evolution.upwind import UpwindTerms, upwind_terms
from src.model.params import Parameters
from src.model.state import LayerState

log = logging.getLogger("silo.fd")


@dataclass(frozen=True)
class StepOutcome:
    u: np.ndarray
    v: np.ndarray
    rates: np.ndarray    # γ(α − |Du|)v, the growth rate of u at every node
    clipped: np.ndarray  # amount added to v to keep it non-negative
    slopes: np.ndarray   # downhill |Du| at the start of the step


def advance(u: np.ndarray, v: np.ndarray, f: np.ndarray, p: Parameters, dt: float, h: float,
            step: int = 0, terms: Optional[UpwindTerms] = None) -> StepOutcome:
    if dt <= 0:
        raise InvalidInputError(f"time step must be positive, got {dt!r}")
    if terms is None:
        terms = upwind_terms(u, v, h)
    rates = p.gamma * (p.alpha - terms.descent) * v
    v_new = v + dt * (p.beta * terms.G - rates + f)
    u_new = u + dt * rates
    if not (np.isfinite(v_new).all() and np.isfinite(u_new).all()):
        raise NonFiniteStateError(step)
    clipped = np.where(v_new < 0, -v_new, 0.0)
    if clipped.any():
        log.debug(f"step {step}: clipped {clipped.sum():.3e} from the rolling layer")
        v_new = np.maximum(v_new, 0.0)
    return StepOutcome(u_new, v_new, rates, clipped, terms.descent)


def _step(state: LayerState, f_sampled, p: Parameters, dt: float, h: float, dim: int) -> LayerState:
    if state.u.ndim != dim:
        raise InvalidInputError(f"expected a {dim}D state, got shape {state.u.shape}")
    f = np.asarray(f_sampled, dtype=float)
    if f.shape != state.u.shape:
        raise InvalidInputError(f"source shape {f.shape} does not match state shape {state.u.shape}")
    outcome = advance(state.u, state.v, f, p, dt, h)
    return LayerState(outcome.u, outcome.v, state.t + dt)


def step_1d(state: LayerState, f_sampled, p: Parameters, dt: float, h: float) -> LayerState:
    return _step(state, f_sampled, p, dt, h, 1)


def step_2d(state: LayerState, f_sampled, p: Parameters, dt: float, h: float) -> LayerState:
    """Transport split into x and y terms, exchange driven by |∇u| = hypot(Dux, Duy)."""
    return _step(state, f_sampled, p, dt, h, 2)
