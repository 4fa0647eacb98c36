"""Vertical sources: piecewise-constant patches plus point atoms.

Everything here is exact for this source class: means, cumulative
integrals and integrals against hat functions carry no quadrature error.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from src.errors import InvalidInputError
from src.model.grids import Grid1D, Grid2D
from src.model.mesh import CourantMesh, IntervalMesh, mesh_for

log = logging.getLogger("silo.model")

# node-in-region tests are inclusive up to this fraction of h
NODE_TOL = 1e-9


# ----------------------- Regions -----------------------

@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    dim = 1

    def __post_init__(self):
        if not self.a < self.b:
            raise InvalidInputError(f"empty interval [{self.a}, {self.b}]")

    @property
    def measure(self) -> float:
        return self.b - self.a

    def inside(self, lengths: Sequence[float]) -> bool:
        return 0.0 <= self.a and self.b <= lengths[0]

    def contains_nodes(self, grid: Grid1D, tol: float) -> np.ndarray:
        return (grid.x >= self.a - tol) & (grid.x <= self.b + tol)


@dataclass(frozen=True)
class Rectangle:
    x0: float
    x1: float
    y0: float
    y1: float

    dim = 2

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise InvalidInputError(f"empty rectangle {self}")

    @property
    def measure(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def inside(self, lengths: Sequence[float]) -> bool:
        return 0.0 <= self.x0 and self.x1 <= lengths[0] and 0.0 <= self.y0 and self.y1 <= lengths[1]

    def contains_nodes(self, grid: Grid2D, tol: float) -> np.ndarray:
        xx, yy = grid.xx, grid.yy
        return (xx >= self.x0 - tol) & (xx <= self.x1 + tol) & (yy >= self.y0 - tol) & (yy <= self.y1 + tol)

    def bounds(self) -> Tuple[float, float, float, float]:
        return self.x0, self.x1, self.y0, self.y1

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        x, y = pts[..., 0], pts[..., 1]
        return (x >= self.x0) & (x <= self.x1) & (y >= self.y0) & (y <= self.y1)

    def triangle_moments(self, tri: np.ndarray) -> Tuple[float, float, float]:
        return _polygon_moments(_clip_to_box(tri, self.bounds()))


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    r: float

    dim = 2

    def __post_init__(self):
        if not self.r > 0:
            raise InvalidInputError(f"disk radius must be positive, got {self.r!r}")

    @property
    def measure(self) -> float:
        return math.pi * self.r ** 2

    def inside(self, lengths: Sequence[float]) -> bool:
        return (self.cx - self.r >= 0.0 and self.cx + self.r <= lengths[0]
                and self.cy - self.r >= 0.0 and self.cy + self.r <= lengths[1])

    def contains_nodes(self, grid: Grid2D, tol: float) -> np.ndarray:
        return np.hypot(grid.xx - self.cx, grid.yy - self.cy) <= self.r + tol

    def bounds(self) -> Tuple[float, float, float, float]:
        return self.cx - self.r, self.cx + self.r, self.cy - self.r, self.cy + self.r

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        return np.hypot(pts[..., 0] - self.cx, pts[..., 1] - self.cy) <= self.r

    def triangle_moments(self, tri: np.ndarray) -> Tuple[float, float, float]:
        area, mx, my = _disk_polygon_moments(tri - np.array([self.cx, self.cy]), self.r)
        return area, mx + self.cx * area, my + self.cy * area


Region = Union[Interval, Rectangle, Disk]


@dataclass(frozen=True)
class Patch:
    region: Region
    intensity: float

    def __post_init__(self):
        if not math.isfinite(self.intensity) or self.intensity < 0:
            raise InvalidInputError(f"patch intensity must be >= 0, got {self.intensity!r}")

    @property
    def mass(self) -> float:
        return self.intensity * self.region.measure


@dataclass(frozen=True)
class Atom:
    location: Tuple[float, ...]
    mass: float

    def __post_init__(self):
        object.__setattr__(self, "location", tuple(float(c) for c in np.ravel(self.location)))
        if not math.isfinite(self.mass) or self.mass < 0:
            raise InvalidInputError(f"atom mass must be >= 0, got {self.mass!r}")

    @property
    def dim(self) -> int:
        return len(self.location)

    def inside(self, lengths: Sequence[float]) -> bool:
        return all(0.0 <= c <= length for c, length in zip(self.location, lengths))


@dataclass(frozen=True)
class SourceSpec:
    """Exact description of a time-independent source f."""

    patches: Tuple[Patch, ...] = ()
    atoms: Tuple[Atom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "patches", tuple(self.patches))
        object.__setattr__(self, "atoms", tuple(self.atoms))
        dims = {p.region.dim for p in self.patches} | {a.dim for a in self.atoms}
        if len(dims) > 1:
            raise InvalidInputError(f"source mixes dimensions {sorted(dims)}")

    @classmethod
    def flat(cls, intensity: float, lengths: Sequence[float]) -> "SourceSpec":
        """f ≡ intensity over the whole domain."""
        if len(lengths) == 1:
            region = Interval(0.0, lengths[0])
        else:
            region = Rectangle(0.0, lengths[0], 0.0, lengths[1])
        return cls(patches=(Patch(region, intensity),))

    @classmethod
    def point(cls, location, mass: float = 1.0) -> "SourceSpec":
        return cls(atoms=(Atom(tuple(np.ravel(location)), mass),))

    @property
    def dim(self) -> Optional[int]:
        for patch in self.patches:
            return patch.region.dim
        for atom in self.atoms:
            return atom.dim
        return None

    @property
    def total_mass(self) -> float:
        return sum(p.mass for p in self.patches) + sum(a.mass for a in self.atoms)

    def scaled(self, factor: float) -> "SourceSpec":
        if factor < 0:
            raise InvalidInputError(f"sources cannot be scaled by a negative factor {factor!r}")
        return SourceSpec(
            tuple(Patch(p.region, factor * p.intensity) for p in self.patches),
            tuple(Atom(a.location, factor * a.mass) for a in self.atoms),
        )

    def __add__(self, other: "SourceSpec") -> "SourceSpec":
        return SourceSpec(self.patches + other.patches, self.atoms + other.atoms)

    def __mul__(self, factor: float) -> "SourceSpec":
        return self.scaled(factor)

    __rmul__ = __mul__

    def check_domain(self, lengths: Sequence[float]) -> None:
        for patch in self.patches:
            if patch.region.dim != len(lengths):
                raise InvalidInputError(f"{patch.region} does not match a {len(lengths)}D domain")
            if not patch.region.inside(lengths):
                raise InvalidInputError(f"{patch.region} extends outside the domain {tuple(lengths)}")
        for atom in self.atoms:
            if atom.dim != len(lengths) or not atom.inside(lengths):
                raise InvalidInputError(f"atom at {atom.location} lies outside the domain {tuple(lengths)}")


# ----------------------- Exact integrals ---------------

def source_mean(f: SourceSpec, domain) -> float:
    """Mean source intensity c = (1/|Ω|)∫f over a grid or mesh."""
    grid = getattr(domain, "grid", domain)
    f.check_domain(grid.lengths)
    return f.total_mass / grid.measure


def cumulative_integral(f: SourceSpec, x, length: float, right: bool = False) -> np.ndarray:
    """∫₀ˣ f for a 1D source.

    Atoms count strictly left of x (the left limit), or up to and including
    x when ``right`` is set. At x = L every atom counts.
    """
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for patch in f.patches:
        region = patch.region
        total = total + patch.intensity * (np.clip(x, region.a, region.b) - region.a)
    for atom in f.atoms:
        z = atom.location[0]
        passed = (z <= x) if right else (z < x)
        total = total + atom.mass * (passed | (x >= length))
    return total


def load_vector(f: SourceSpec, mesh, include_atoms: bool = True) -> np.ndarray:
    """Flat vector of ∫ f φ_i over every hat function φ_i of ``mesh``."""
    f.check_domain(mesh.grid.lengths)
    load = np.zeros(mesh.node_count)
    for patch in f.patches:
        if isinstance(mesh, IntervalMesh):
            _add_interval_patch(load, patch, mesh)
        else:
            _add_plane_patch(load, patch, mesh)
    if include_atoms:
        for atom in f.atoms:
            nodes, values = mesh.locate(atom.location)
            np.add.at(load, nodes, atom.mass * values)
    return load


def _add_interval_patch(load: np.ndarray, patch: Patch, mesh: IntervalMesh) -> None:
    x, h = mesh.grid.x, mesh.grid.h
    left, right = x[:-1], x[1:]
    p = np.clip(patch.region.a, left, right)
    q = np.clip(patch.region.b, left, right)
    to_left = ((right - p) ** 2 - (right - q) ** 2) / (2 * h)
    to_right = ((q - left) ** 2 - (p - left) ** 2) / (2 * h)
    np.add.at(load, mesh.elements[:, 0], patch.intensity * to_left)
    np.add.at(load, mesh.elements[:, 1], patch.intensity * to_right)


def _add_plane_patch(load: np.ndarray, patch: Patch, mesh: CourantMesh) -> None:
    region = patch.region
    coords = mesh.coordinates
    tris = coords[mesh.elements]
    x0, x1, y0, y1 = region.bounds()
    lo, hi = tris.min(axis=1), tris.max(axis=1)
    touching = (hi[:, 0] > x0) & (lo[:, 0] < x1) & (hi[:, 1] > y0) & (lo[:, 1] < y1)
    # a region is convex, so all three vertices inside means the whole element is inside
    covered = touching & region.contains_points(tris).all(axis=1)
    share = patch.intensity * mesh.element_measure / 3
    np.add.at(load, mesh.elements[covered].ravel(), share)

    for e in np.flatnonzero(touching & ~covered):
        area, mx, my = region.triangle_moments(tris[e])
        if area <= 0.0:
            continue
        grads = mesh.gradients[e]
        offsets = 1.0 - np.einsum("kd,kd->k", grads, tris[e])
        load[mesh.elements[e]] += patch.intensity * (offsets * area + grads @ np.array([mx, my]))


def sample_source(f: SourceSpec, grid, rule: str = "nodal") -> np.ndarray:
    """Nodal values of f on ``grid``.

    "nodal": intensity at every node inside a region (region boundary
    included), atoms as mass/h^d on their nearest node.
    "lumped": ∫fφ_i over the node's control volume for the patches, atoms as
    mass over the nearest node's control volume; the weighted nodal sum
    equals ∫f exactly.
    """
    f.check_domain(grid.lengths)
    if rule == "nodal":
        values = np.zeros(grid.shape)
        tol = NODE_TOL * grid.h
        for patch in f.patches:
            values[patch.region.contains_nodes(grid, tol)] += patch.intensity
        for atom in f.atoms:
            values[grid.nearest_node(atom.location)] += atom.mass / grid.h ** grid.dim
        return values
    if rule == "lumped":
        mesh = mesh_for(grid)
        # patches covering the whole domain are constant, keep them exact
        full = [p for p in f.patches if _covers(p.region, grid.lengths)]
        partial = SourceSpec(tuple(p for p in f.patches if p not in full))
        values = load_vector(partial, mesh, include_atoms=False).reshape(grid.shape) / grid.control_volumes
        values += sum(p.intensity for p in full)
        for atom in f.atoms:
            node = grid.nearest_node(atom.location)
            values[node] += atom.mass / grid.control_volumes[node]
        return values
    raise InvalidInputError(f"unknown sampling rule {rule!r}")


# ----------------------- Clipping geometry -------------

def _covers(region: Region, lengths: Sequence[float]) -> bool:
    if isinstance(region, Interval):
        return region.a <= 0.0 and region.b >= lengths[0]
    if isinstance(region, Rectangle):
        return region.x0 <= 0.0 and region.x1 >= lengths[0] and region.y0 <= 0.0 and region.y1 >= lengths[1]
    return False


def _clip_to_box(poly: np.ndarray, bounds: Tuple[float, float, float, float]) -> np.ndarray:
    x0, x1, y0, y1 = bounds
    planes = ((0, x0, 1.0), (0, x1, -1.0), (1, y0, 1.0), (1, y1, -1.0))
    points = [tuple(p) for p in poly]
    for axis, level, sign in planes:
        if not points:
            break
        kept = []
        for k, current in enumerate(points):
            previous = points[k - 1]
            cur_in = sign * (current[axis] - level) >= 0
            prev_in = sign * (previous[axis] - level) >= 0
            if cur_in != prev_in:
                t = (level - previous[axis]) / (current[axis] - previous[axis])
                kept.append(tuple(previous[d] + t * (current[d] - previous[d]) for d in range(2)))
            if cur_in:
                kept.append(current)
        points = kept
    return np.array(points).reshape(-1, 2)


def _polygon_moments(poly: np.ndarray) -> Tuple[float, float, float]:
    """Area and first moments ∫x, ∫y of a counter-clockwise polygon."""
    if len(poly) < 3:
        return 0.0, 0.0, 0.0
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    return cross.sum() / 2, ((x + xn) * cross).sum() / 6, ((y + yn) * cross).sum() / 6


def _disk_polygon_moments(poly: np.ndarray, r: float) -> Tuple[float, float, float]:
    """Area and first moments of (polygon ∩ disk of radius r at the origin).

    Sums, edge by edge, the signed fan triangle (0, p, q) intersected with
    the disk: straight pieces inside the circle contribute triangles, pieces
    outside contribute circular sectors.
    """
    area = mx = my = 0.0
    for k in range(len(poly)):
        p, q = poly[k], poly[(k + 1) % len(poly)]
        d = q - p
        breaks = [0.0]
        a, b, c = d @ d, 2 * (p @ d), p @ p - r * r
        disc = b * b - 4 * a * c
        if a > 0 and disc > 0:
            root = math.sqrt(disc)
            breaks += sorted(t for t in ((-b - root) / (2 * a), (-b + root) / (2 * a)) if 0.0 < t < 1.0)
        breaks.append(1.0)
        for t0, t1 in zip(breaks[:-1], breaks[1:]):
            s, e = p + t0 * d, p + t1 * d
            mid = p + 0.5 * (t0 + t1) * d
            if mid @ mid <= r * r:
                piece = (s[0] * e[1] - e[0] * s[1]) / 2
                area += piece
                mx += piece * (s[0] + e[0]) / 3
                my += piece * (s[1] + e[1]) / 3
            else:
                theta0 = math.atan2(s[1], s[0])
                sweep = math.atan2(s[0] * e[1] - e[0] * s[1], s @ e)
                theta1 = theta0 + sweep
                area += r * r * sweep / 2
                mx += r ** 3 / 3 * (math.sin(theta1) - math.sin(theta0))
                my += r ** 3 / 3 * (math.cos(theta0) - math.cos(theta1))
    return area, mx, my
