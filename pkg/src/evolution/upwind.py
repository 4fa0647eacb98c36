"""Upwind differences and the conservative transport term of the rolling layer.

Fields are nodal arrays; every operation works along each array axis in
turn, so the same code serves intervals and rectangles. Walls reflect u,
which makes the missing one-sided difference 0, and carry no flux.

Transport moves material across each interface from the higher node to the
lower one, at the interface slope times the rolling layer of the higher
node. The exchange term sees the steepest drop from a node to a lower
neighbour.
"""
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from src.model.params import Parameters
from src.model.state import LayerState


class UpwindTerms(NamedTuple):
    slopes: List[np.ndarray]  # upwind Du along each axis
    magnitude: np.ndarray     # |∇u| built from the upwind Du
    descent: np.ndarray       # steepest downhill slope, seen by the exchange term
    G: np.ndarray             # discrete ∇·(v∇u)


def _differences(u: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    step = np.diff(u, axis=-1) / h
    backward = np.zeros_like(u)
    forward = np.zeros_like(u)
    backward[..., 1:] = step
    forward[..., :-1] = step
    return step, backward, forward


def one_sided_differences(u: np.ndarray, h: float, axis: int = -1) -> Tuple[np.ndarray, np.ndarray]:
    """Backward and forward differences along ``axis``, 0 where the wall cuts them off."""
    _, backward, forward = _differences(np.moveaxis(np.asarray(u, dtype=float), axis, -1), h)
    return np.moveaxis(backward, -1, axis), np.moveaxis(forward, -1, axis)


def _pick(backward: np.ndarray, forward: np.ndarray) -> np.ndarray:
    # larger magnitude wins, exact ties go to the backward difference
    return np.where(np.abs(forward) > np.abs(backward), forward, backward)


def du_upwind(u: np.ndarray, h: float, i=None, axis: int = -1):
    """Upwind difference Du at every node, or at node ``i`` when given."""
    du = _pick(*one_sided_differences(u, h, axis))
    return du if i is None else float(du[i])


def _descent(backward: np.ndarray, forward: np.ndarray) -> np.ndarray:
    # drop towards the lower neighbour, 0 in a valley or against a higher wall
    return np.maximum(np.maximum(backward, 0.0), np.maximum(-forward, 0.0))


def _axis_terms(u: np.ndarray, v: np.ndarray, h: float, axis: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    u = np.moveaxis(u, axis, -1)
    v = np.moveaxis(v, axis, -1)
    step, backward, forward = _differences(u, h)

    # material crosses an interface downhill, carried by the upper node
    carrier = np.where(step > 0, v[..., 1:], v[..., :-1])
    flux = carrier * step
    G = np.zeros_like(u)
    G[..., :-1] += flux
    G[..., 1:] -= flux
    G /= h
    # wall nodes own half a cell
    G[..., 0] *= 2.0
    G[..., -1] *= 2.0
    du = _pick(backward, forward)
    descent = _descent(backward, forward)
    return tuple(np.moveaxis(a, -1, axis) for a in (du, descent, G))


def _norm(components: List[np.ndarray]) -> np.ndarray:
    return np.abs(components[0]) if len(components) == 1 else np.hypot(*components)


def upwind_terms(u: np.ndarray, v: np.ndarray, h: float) -> UpwindTerms:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    slopes, descents, G = [], [], np.zeros_like(u)
    for axis in range(u.ndim):
        du, descent, g = _axis_terms(u, v, h, axis)
        slopes.append(du)
        descents.append(descent)
        G = G + g
    return UpwindTerms(slopes, _norm(slopes), _norm(descents), G)


def upwind_slopes(u: np.ndarray, h: float) -> np.ndarray:
    """|∇u| with each component taken upwind along its axis."""
    u = np.asarray(u, dtype=float)
    return _norm([du_upwind(u, h, axis=axis) for axis in range(u.ndim)])


def flux_G(u: np.ndarray, v: np.ndarray, h: float, i=None):
    G = upwind_terms(u, v, h).G
    return G if i is None else float(G[i])


def dt_bound(max_slope: float, max_v: float, p: Parameters, cfl_safety: float,
             exchange_cap_safety: float, h: float) -> float:
    speed = p.alpha + max_slope
    advective = cfl_safety * h / (p.beta * speed) / max(1.0, max_v)
    exchange = exchange_cap_safety / (p.gamma * speed)
    if max_v <= 0:
        return min(advective, exchange)
    # u moves at speed γv along its own slope
    kinematic = cfl_safety * h / (p.gamma * max_v)
    return min(advective, exchange, kinematic)


def stable_dt(state: LayerState, p: Parameters, cfg, h: float, slopes: Optional[np.ndarray] = None) -> float:
    if slopes is None:
        slopes = upwind_slopes(state.u, h)
    return dt_bound(float(slopes.max()), float(state.v.max()), p, cfg.cfl_safety, cfg.exchange_cap_safety, h)
