"""Piecewise-linear finite element meshes over the uniform grids.

Nodes are numbered like a C-order ravel of the grid's nodal arrays, so a
flat FE vector reshapes straight back to ``grid.shape``.
"""
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from src.errors import InvalidInputError
from src.model.grids import Grid1D, Grid2D


@dataclass(frozen=True)
class IntervalMesh:
    """Intervals [x_k, x_{k+1}] of a Grid1D with hat functions on the nodes."""

    grid: Grid1D
    elements: np.ndarray = field(init=False, repr=False, compare=False)
    gradients: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.grid.node_count
        h = self.grid.h
        elements = np.column_stack([np.arange(n - 1), np.arange(1, n)])
        gradients = np.empty((n - 1, 2, 1))
        gradients[:, 0, 0] = -1.0 / h
        gradients[:, 1, 0] = 1.0 / h
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "gradients", gradients)

    dim = 1

    @property
    def node_count(self) -> int:
        return self.grid.node_count

    @property
    def element_count(self) -> int:
        return self.grid.node_count - 1

    @property
    def element_measure(self) -> float:
        return self.grid.h

    @property
    def measure(self) -> float:
        return self.grid.measure

    @property
    def coordinates(self) -> np.ndarray:
        return self.grid.x[:, None]

    @property
    def lumped_mass(self) -> np.ndarray:
        """Integral of each hat function."""
        return self.grid.control_volumes.copy()

    def locate(self, point) -> Tuple[np.ndarray, np.ndarray]:
        """Return the node indices of the element holding ``point`` and the hat values there."""
        x = float(np.ravel(point)[0])
        h, n = self.grid.h, self.grid.node_count
        k = min(max(int(np.floor(x / h)), 0), n - 2)
        t = (x - self.grid.x[k]) / h
        return self.elements[k], np.array([1.0 - t, t])


@dataclass(frozen=True)
class CourantMesh:
    """Courant triangulation of a Grid2D.

    Every square cell is split along its lower-left to upper-right diagonal
    into a lower-right triangle (00, 10, 11) and an upper-left one
    (00, 11, 01), both counter-clockwise, each of area h^2/2.
    """

    grid: Grid2D
    elements: np.ndarray = field(init=False, repr=False, compare=False)
    gradients: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        nx, ny, h = self.grid.nx, self.grid.ny, self.grid.h
        jj, ii = np.meshgrid(np.arange(ny - 1), np.arange(nx - 1), indexing="ij")
        n00 = (jj * nx + ii).ravel()
        n10, n01 = n00 + 1, n00 + nx
        n11 = n01 + 1
        lower = np.column_stack([n00, n10, n11])
        upper = np.column_stack([n00, n11, n01])
        elements = np.empty((2 * n00.size, 3), dtype=int)
        elements[0::2] = lower
        elements[1::2] = upper

        gradients = np.empty((elements.shape[0], 3, 2))
        gradients[0::2] = np.array([[-1.0, 0.0], [1.0, -1.0], [0.0, 1.0]]) / h
        gradients[1::2] = np.array([[0.0, -1.0], [1.0, 0.0], [-1.0, 1.0]]) / h
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "gradients", gradients)

    dim = 2

    @property
    def node_count(self) -> int:
        return self.grid.node_count

    @property
    def element_count(self) -> int:
        return self.elements.shape[0]

    @property
    def element_measure(self) -> float:
        return self.grid.h ** 2 / 2

    @property
    def measure(self) -> float:
        return self.grid.measure

    @property
    def coordinates(self) -> np.ndarray:
        return np.column_stack([self.grid.xx.ravel(), self.grid.yy.ravel()])

    @property
    def lumped_mass(self) -> np.ndarray:
        mass = np.zeros(self.node_count)
        np.add.at(mass, self.elements.ravel(), self.element_measure / 3)
        return mass

    def locate(self, point) -> Tuple[np.ndarray, np.ndarray]:
        px, py = (float(c) for c in point)
        h, nx, ny = self.grid.h, self.grid.nx, self.grid.ny
        i = min(max(int(np.floor(px / h)), 0), nx - 2)
        j = min(max(int(np.floor(py / h)), 0), ny - 2)
        s = (px - self.grid.x[i]) / h
        t = (py - self.grid.y[j]) / h
        cell = j * (nx - 1) + i
        if s >= t:
            return self.elements[2 * cell], np.array([1.0 - s, s - t, t])
        return self.elements[2 * cell + 1], np.array([1.0 - t, s, t - s])


Mesh = Union[IntervalMesh, CourantMesh]


def mesh_for(grid) -> Mesh:
    if isinstance(grid, Grid1D):
        return IntervalMesh(grid)
    if isinstance(grid, Grid2D):
        return CourantMesh(grid)
    raise InvalidInputError(f"no mesh for {type(grid).__name__}")
