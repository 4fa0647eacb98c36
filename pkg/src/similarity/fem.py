"""Piecewise-linear stiffness assembly and the semidefinite Neumann solve."""
import logging
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, cg

import config
from src.errors import AssemblyError, InvalidInputError, SolverConvergenceError
from src.model.params import Parameters
from src.model.sources import SourceSpec, load_vector, source_mean

log = logging.getLogger("silo.fem")

# relative size of the right-hand side sum tolerated before the system counts as incompatible
COMPATIBILITY_RTOL = 1e-10


def assemble_stiffness(mesh, weights: Optional[np.ndarray] = None) -> sparse.csr_matrix:
    """K_ij = Σ_e w_e ∫_e ∇φ_i·∇φ_j, with w ≡ 1 when no weights are given."""
    grads = mesh.gradients
    local = np.einsum("ekd,eld->ekl", grads, grads) * mesh.element_measure
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (mesh.element_count,):
            raise InvalidInputError(f"expected {mesh.element_count} element weights, got {weights.shape}")
        local = local * weights[:, None, None]
    k = mesh.elements.shape[1]
    rows = np.repeat(mesh.elements, k, axis=1).ravel()
    cols = np.tile(mesh.elements, (1, k)).ravel()
    n = mesh.node_count
    return sparse.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def assemble_load(f: SourceSpec, mesh, p: Parameters) -> Tuple[np.ndarray, float]:
    """Right-hand side of -Δψ = (f - c_h)/β against every hat function, plus c_h."""
    c_h = source_mean(f, mesh)
    load = load_vector(f, mesh)
    b = (load - c_h * mesh.lumped_mass) / p.beta
    scale = (np.abs(load).sum() + c_h * mesh.measure) / p.beta
    if abs(b.sum()) > COMPATIBILITY_RTOL * max(scale, np.finfo(float).tiny):
        raise AssemblyError(f"right-hand side sums to {b.sum():.3e} against a scale of {scale:.3e}")
    b = b - b.mean()
    # a flat source leaves only rounding noise behind
    if np.abs(b).max() <= 1e3 * np.finfo(float).eps * scale / mesh.node_count:
        b = np.zeros_like(b)
    return b, c_h


class NeumannSolution(NamedTuple):
    x: np.ndarray
    backward_error: float
    relative_residual: float
    iterations: int


def _project(x: np.ndarray) -> np.ndarray:
    return x - x.mean()


def solve_neumann(K: sparse.csr_matrix, b: np.ndarray, mass: np.ndarray,
                  tol: Optional[float] = None, x0: Optional[np.ndarray] = None) -> NeumannSolution:
    """Solve K x = b on the complement of the constants by projected CG.

    Returns x with zero ``mass``-weighted mean, the normwise backward error
    ‖b - Kx‖ / (‖b‖ + ‖K‖∞‖x‖) the solve is accepted on, the relative residual
    ‖b - Kx‖ / ‖b‖ and the number of CG iterations.
    """
    tol = config.CG_TOLERANCE if tol is None else tol
    n = K.shape[0]
    b = _project(np.asarray(b, dtype=float))
    if not np.any(b):
        return NeumannSolution(np.zeros(n), 0.0, 0.0, 0)

    op = LinearOperator((n, n), matvec=lambda x: _project(K @ _project(np.ravel(x))), dtype=float)
    x = np.zeros(n) if x0 is None else _project(np.asarray(x0, dtype=float).ravel())
    norm_k = abs(K).sum(axis=1).max()
    maxiter = config.CG_MAXITER_FACTOR * n
    iterations = 0
    residual = relative = np.inf

    def count(_):
        nonlocal iterations
        iterations += 1

    for attempt in range(config.CG_RESTARTS + 1):
        x, info = cg(op, b, x0=x, rtol=tol, atol=0.0, maxiter=maxiter, callback=count)
        x = _project(x)
        true = np.linalg.norm(b - _project(K @ x))
        residual = true / (np.linalg.norm(b) + norm_k * np.linalg.norm(x))
        relative = true / np.linalg.norm(b)
        if residual <= tol:
            break
        log.info(f"cg attempt {attempt}: info={info} backward error {residual:.3e}, restarting")
    else:
        raise SolverConvergenceError("projected CG did not converge", residual, iterations)

    x = x - (mass @ x) / mass.sum()
    log.debug(f"cg converged: n={n} iterations={iterations} backward error={residual:.3e} relative={relative:.3e}")
    return NeumannSolution(x, float(residual), float(relative), iterations)
