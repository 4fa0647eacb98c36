"""Closed-form similarity solutions used as oracles for both solvers."""
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.errors import InvalidInputError
from src.model.grids import Grid1D
from src.model.params import Parameters
from src.model.sources import SourceSpec, cumulative_integral, source_mean
from src.model.state import SimilarityPair

log = logging.getLogger("silo.exact")


def G_function(f: SourceSpec, x, length: float, right: bool = False):
    """G(x) = (x/L)∫₀ᴸf − ∫₀ˣf, scalar or vectorized over x.

    At an atom G takes its left limit unless ``right`` is set.
    """
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0) or np.any(xs > length):
        raise InvalidInputError(f"G is defined on [0, {length}], got {x!r}")
    total = cumulative_integral(f, length, length)
    values = (xs / length) * total - cumulative_integral(f, xs, length, right)
    return float(values) if values.ndim == 0 else values


def _total_mass(f: SourceSpec, length: float) -> float:
    total = float(cumulative_integral(f, length, length))
    if total <= 0:
        raise InvalidInputError("similarity profiles need a source with positive mass")
    return total


def slope_1d_exact(f: SourceSpec, grid: Grid1D, p: Parameters, right: bool = False) -> np.ndarray:
    """U_x at the nodes, one-sided at atoms."""
    total = _total_mass(f, grid.length)
    G = G_function(f, grid.x, grid.length, right)
    return p.alpha * G / (p.beta / (p.gamma * grid.length) * total + np.abs(G))


def similarity_1d_exact(f: SourceSpec, grid: Grid1D, p: Parameters) -> SimilarityPair:
    total = _total_mass(f, grid.length)
    G = G_function(f, grid.x, grid.length)
    V = total / (p.gamma * p.alpha * grid.length) + np.abs(G) / (p.alpha * p.beta)
    # each trapezoid uses the one-sided slopes from inside its interval
    starts = slope_1d_exact(f, grid, p, right=True)[:-1]
    ends = slope_1d_exact(f, grid, p)[1:]
    U = np.concatenate([[0.0], np.cumsum(0.5 * (starts + ends) * grid.h)])
    return SimilarityPair.normalized(U, V, source_mean(f, grid))


def example1_exact(grid: Grid1D, p: Parameters, form: str = "printed") -> SimilarityPair:
    """Unit point source over the middle of (0, L).

    form="printed" evaluates (αγ/β)(x − ln(1+x)); form="consistent" evaluates
    α(x − (β/γ)ln(1 + γx/β)), which agrees with similarity_1d_exact for any
    parameters. Both coincide when α = β = γ = 1.
    """
    L, x = grid.length, grid.x
    dist = np.minimum(x, L - x)
    V = 1.0 / (p.gamma * p.alpha * L) + dist / (p.alpha * p.beta * L)
    if form == "printed":
        U = p.alpha * p.gamma / p.beta * (dist - np.log1p(dist))
    elif form == "consistent":
        ratio = p.beta / p.gamma
        U = p.alpha * (dist - ratio * np.log1p(dist / ratio))
    else:
        raise InvalidInputError(f"unknown form {form!r}")
    return SimilarityPair.normalized(U, V, 1.0 / L)


@dataclass(frozen=True)
class RadialProfile:
    R: float
    c: float
    radii: np.ndarray
    V: np.ndarray
    U_r: np.ndarray
    U: np.ndarray

    @property
    def max_slope(self) -> float:
        return float(np.max(np.abs(self.U_r)))


def radial_rolling(r, R: float, p: Parameters, c: float):
    r = np.asarray(r, dtype=float)
    return c / (p.gamma * p.alpha) * (1.0 + p.gamma / (2 * p.beta * r) * (R ** 2 - r ** 2))


def radial_slope(r, R: float, p: Parameters):
    r = np.asarray(r, dtype=float)
    gap = R ** 2 - r ** 2
    return -p.alpha * gap / (gap + 2 * p.beta * r / p.gamma)


def example2_radial(R: float, p: Parameters, c: float, radii: Sequence[float]) -> RadialProfile:
    """Central point source in the disk of radius R; V is singular at r = 0."""
    r = np.sort(np.asarray(radii, dtype=float))
    if r.size == 0 or r[0] <= 0 or r[-1] > R:
        raise InvalidInputError(f"radii must lie in (0, {R}]")
    if c <= 0:
        raise InvalidInputError(f"growth velocity must be positive, got {c!r}")
    nodes = r if r[-1] == R else np.append(r, R)
    slope = radial_slope(nodes, R, p)
    # integrate inward from the wall, where U(R) = 0
    steps = 0.5 * (slope[1:] + slope[:-1]) * np.diff(nodes)
    U = np.concatenate([-np.cumsum(steps[::-1])[::-1], [0.0]])[: r.size]
    return RadialProfile(R, c, r, radial_rolling(r, R, p, c), slope[: r.size], U)
