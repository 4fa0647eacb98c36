"""Discrete similarity profiles from the flux potential.

Pipeline: ψ from the Neumann problem, w = ∇ψ per element,
V = c_h/(γα) + |w|/α, ∇U = w/V, then U by integration (1D) or by a
V-weighted Neumann solve (2D).
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import InvalidInputError
from src.model.grids import Grid1D
from src.model.mesh import IntervalMesh, mesh_for
from src.model.params import Parameters
from src.model.sources import SourceSpec, source_mean
from src.model.state import SimilarityPair
from src.similarity.fem import assemble_load, assemble_stiffness, solve_neumann

log = logging.getLogger("silo.fem")


@dataclass(frozen=True)
class ElementField:
    """One scalar or one vector per element."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim not in (1, 2):
            raise InvalidInputError(f"element field must be 1D or 2D, got shape {self.values.shape}")

    @property
    def is_vector(self) -> bool:
        return self.values.ndim == 2

    def __len__(self) -> int:
        return self.values.shape[0]

    def magnitude(self) -> np.ndarray:
        return np.linalg.norm(self.values, axis=1) if self.is_vector else np.abs(self.values)

    def check(self, mesh) -> "ElementField":
        if len(self) != mesh.element_count:
            raise InvalidInputError(f"field has {len(self)} entries, mesh has {mesh.element_count} elements")
        return self


@dataclass(frozen=True)
class PotentialSolution:
    psi: np.ndarray
    residual_norm: float
    relative_residual: float
    iterations: int


def discrete_mean_rate(f: SourceSpec, mesh) -> float:
    # intervals and rectangles are meshed exactly, so c_h = c
    return source_mean(f, mesh)


def solve_potential(f: SourceSpec, mesh, p: Parameters, tol: Optional[float] = None,
                    x0: Optional[np.ndarray] = None) -> PotentialSolution:
    if f.total_mass <= 0:
        raise InvalidInputError("the potential problem needs a source with positive mass")
    b, c_h = assemble_load(f, mesh, p)
    solved = solve_neumann(assemble_stiffness(mesh), b, mesh.lumped_mass, tol, x0)
    log.info(f"potential solved: nodes={mesh.node_count} c_h={c_h:.6g} iterations={solved.iterations} "
             f"backward error={solved.backward_error:.2e} relative residual={solved.relative_residual:.2e}")
    return PotentialSolution(solved.x, solved.backward_error, solved.relative_residual, solved.iterations)


def flux_from_potential(psi: np.ndarray, mesh) -> ElementField:
    psi = np.asarray(psi, dtype=float).ravel()
    if psi.size != mesh.node_count:
        raise InvalidInputError(f"psi has {psi.size} values, mesh has {mesh.node_count} nodes")
    return ElementField(np.einsum("ekd,ek->ed", mesh.gradients, psi[mesh.elements]))


def rolling_from_flux(w: ElementField, c_h: float, p: Parameters) -> ElementField:
    return ElementField(c_h / (p.gamma * p.alpha) + w.magnitude() / p.alpha)


def standing_gradient(w: ElementField, V: ElementField) -> ElementField:
    if np.any(V.values <= 0):
        raise InvalidInputError(f"rolling layer must be positive on every element (min {V.values.min():.3e})")
    return ElementField(w.values / (V.values[:, None] if w.is_vector else V.values))


def reconstruct_u_1d(z: ElementField, grid: Grid1D) -> np.ndarray:
    slopes = z.values[:, 0] if z.is_vector else z.values
    if slopes.size != grid.node_count - 1:
        raise InvalidInputError(f"expected {grid.node_count - 1} interval slopes, got {slopes.size}")
    u = np.concatenate([[0.0], grid.h * np.cumsum(slopes)])
    return u - u.min()


def reconstruct_u_2d(V: ElementField, f: SourceSpec, mesh, p: Parameters, tol: Optional[float] = None,
                     x0: Optional[np.ndarray] = None) -> np.ndarray:
    """Nodal U from ∫V∇U·∇φ = ∫gφ, reshaped to the grid and min-shifted."""
    V.check(mesh)
    if np.any(V.values <= 0):
        raise InvalidInputError("weights of the standing-layer problem must be positive")
    b, _ = assemble_load(f, mesh, p)
    solved = solve_neumann(assemble_stiffness(mesh, V.values), b, mesh.lumped_mass, tol, x0)
    log.info(f"standing layer solved: nodes={mesh.node_count} iterations={solved.iterations} "
             f"backward error={solved.backward_error:.2e}")
    u = solved.x.reshape(mesh.grid.shape)
    return u - u.min()


def element_to_node(field: ElementField, mesh) -> np.ndarray:
    """Unweighted mean over the elements incident to each node, shaped like the grid."""
    field.check(mesh)
    k = mesh.elements.shape[1]
    counts = np.bincount(mesh.elements.ravel(), minlength=mesh.node_count).astype(float)
    values = np.repeat(field.values, k, axis=0)
    sums = np.zeros((mesh.node_count,) + field.values.shape[1:])
    np.add.at(sums, mesh.elements.ravel(), values)
    nodal = sums / counts.reshape((-1,) + (1,) * (sums.ndim - 1))
    return nodal.reshape(mesh.grid.shape + field.values.shape[1:])


@dataclass(frozen=True)
class DiscreteSimilarity:
    """Nodal similarity pair together with the element fields it came from."""

    pair: SimilarityPair
    potential: PotentialSolution
    w: ElementField
    V: ElementField
    z: ElementField


def discrete_similarity(f: SourceSpec, grid, p: Parameters, tol: Optional[float] = None) -> DiscreteSimilarity:
    mesh = mesh_for(grid)
    c_h = discrete_mean_rate(f, mesh)
    potential = solve_potential(f, mesh, p, tol)
    w = flux_from_potential(potential.psi, mesh)
    V = rolling_from_flux(w, c_h, p)
    z = standing_gradient(w, V)
    if isinstance(mesh, IntervalMesh):
        U = reconstruct_u_1d(z, grid)
    else:
        U = reconstruct_u_2d(V, f, mesh, p, tol)
    pair = SimilarityPair.normalized(U, element_to_node(V, mesh), c_h)
    return DiscreteSimilarity(pair, potential, w, V, z)
