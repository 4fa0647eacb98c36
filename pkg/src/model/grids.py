from dataclasses import dataclass
from functools import cached_property
from typing import Tuple, Union

import numpy as np

from src.errors import InvalidInputError

SPACING_RTOL = 1e-10


def _node_count(length: float, h: float) -> int:
    count = int(round(length / h)) + 1
    if count < 3 or abs(length / (count - 1) - h) > SPACING_RTOL * h:
        raise InvalidInputError(f"spacing h={h!r} does not divide length {length!r} into at least 2 cells")
    return count


def _axis_nodes(length: float, count: int) -> np.ndarray:
    # i/(N-1) is correctly rounded, so dyadic nodes such as L/2 come out exact
    nodes = length * (np.arange(count) / (count - 1))
    nodes[-1] = length
    return nodes


def _axis_weights(count: int, h: float) -> np.ndarray:
    weights = np.full(count, h)
    weights[0] = weights[-1] = h / 2
    return weights


@dataclass(frozen=True)
class Grid1D:
    """Uniform lattice x_i = (i-1)h on [0, L] (stored 0-based)."""

    length: float
    node_count: int

    def __post_init__(self):
        if not np.isfinite(self.length) or self.length <= 0:
            raise InvalidInputError(f"length must be positive, got {self.length!r}")
        if self.node_count < 3:
            raise InvalidInputError(f"node_count must be >= 3, got {self.node_count!r}")

    @classmethod
    def from_spacing(cls, length: float, h: float) -> "Grid1D":
        return cls(length, _node_count(length, h))

    dim = 1

    @property
    def h(self) -> float:
        return self.length / (self.node_count - 1)

    @property
    def shape(self) -> Tuple[int]:
        return (self.node_count,)

    @property
    def lengths(self) -> Tuple[float]:
        return (self.length,)

    @property
    def measure(self) -> float:
        return self.length

    @cached_property
    def x(self) -> np.ndarray:
        return _axis_nodes(self.length, self.node_count)

    @cached_property
    def control_volumes(self) -> np.ndarray:
        """Trapezoidal weights: wall nodes own half a cell."""
        return _axis_weights(self.node_count, self.h)

    def nearest_node(self, point) -> Tuple[int]:
        return (_nearest_index(float(np.ravel(point)[0]), self.h, self.node_count),)


@dataclass(frozen=True)
class Grid2D:
    """Uniform lattice on [0, Lx] x [0, Ly] with the same spacing along both axes.

    Nodal fields are arrays of shape (ny, nx): rows follow y, columns follow x.
    """

    lx: float
    ly: float
    nx: int
    ny: int

    def __post_init__(self):
        if min(self.lx, self.ly) <= 0 or not np.isfinite(self.lx + self.ly):
            raise InvalidInputError(f"lengths must be positive, got {self.lx!r} x {self.ly!r}")
        if min(self.nx, self.ny) < 3:
            raise InvalidInputError(f"node counts must be >= 3, got {self.nx} x {self.ny}")
        hx, hy = self.lx / (self.nx - 1), self.ly / (self.ny - 1)
        if abs(hx - hy) > SPACING_RTOL * max(hx, hy):
            raise InvalidInputError(f"spacing differs between axes: {hx!r} vs {hy!r}")

    @classmethod
    def from_spacing(cls, lx: float, ly: float, h: float) -> "Grid2D":
        return cls(lx, ly, _node_count(lx, h), _node_count(ly, h))

    @classmethod
    def square(cls, length: float, node_count: int) -> "Grid2D":
        return cls(length, length, node_count, node_count)

    dim = 2

    @property
    def h(self) -> float:
        return self.lx / (self.nx - 1)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def lengths(self) -> Tuple[float, float]:
        return (self.lx, self.ly)

    @property
    def measure(self) -> float:
        return self.lx * self.ly

    @property
    def node_count(self) -> int:
        return self.nx * self.ny

    @cached_property
    def x(self) -> np.ndarray:
        return _axis_nodes(self.lx, self.nx)

    @cached_property
    def y(self) -> np.ndarray:
        return _axis_nodes(self.ly, self.ny)

    @cached_property
    def xx(self) -> np.ndarray:
        return np.broadcast_to(self.x[None, :], self.shape)

    @cached_property
    def yy(self) -> np.ndarray:
        return np.broadcast_to(self.y[:, None], self.shape)

    @cached_property
    def control_volumes(self) -> np.ndarray:
        """Product of the axis weights: h^2 inside, h^2/2 on edges, h^2/4 at corners."""
        return np.outer(_axis_weights(self.ny, self.h), _axis_weights(self.nx, self.h))

    def nearest_node(self, point) -> Tuple[int, int]:
        px, py = (float(c) for c in point)
        return (_nearest_index(py, self.h, self.ny), _nearest_index(px, self.h, self.nx))


@dataclass(frozen=True)
class RadialGrid:
    """Radii r_i = ih, i = 1..n, on (0, R]. The center is left out."""

    radius: float
    node_count: int

    def __post_init__(self):
        if not np.isfinite(self.radius) or self.radius <= 0:
            raise InvalidInputError(f"radius must be positive, got {self.radius!r}")
        if self.node_count < 2:
            raise InvalidInputError(f"node_count must be >= 2, got {self.node_count!r}")

    @classmethod
    def from_spacing(cls, radius: float, h: float) -> "RadialGrid":
        return cls(radius, _node_count(radius, h) - 1)

    dim = 1

    @property
    def h(self) -> float:
        return self.radius / self.node_count

    @property
    def shape(self) -> Tuple[int]:
        return (self.node_count,)

    @cached_property
    def r(self) -> np.ndarray:
        return _axis_nodes(self.radius, self.node_count + 1)[1:]


Grid = Union[Grid1D, Grid2D]


def _nearest_index(coordinate: float, h: float, count: int) -> int:
    # exact halves go to the lower index
    index = int(np.ceil(coordinate / h - 0.5 - 1e-9))
    return min(max(index, 0), count - 1)
