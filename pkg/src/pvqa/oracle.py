"""Classical finite-difference reference solutions."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, solve_banded

from .errors import SingularSystemError
from .operators import BoundaryCondition, PoissonProblem, laplacian_matrix

log = logging.getLogger(__name__)

NULL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ClassicalSolution:
    u: np.ndarray
    residual_norm: float
    gauge: str  # "none" or "mean-zero"


def solve_classical(problem: PoissonProblem) -> ClassicalSolution:
    """Solve ``A u = f`` with the same matrix the quantum side encodes.

    Dirichlet is a banded (tridiagonal) solve. Periodic and Neumann matrices
    annihilate constants, so those are solved on the mean-zero subspace
    through the eigenbasis; periodic sources must already be mean-zero,
    Neumann sources are projected.
    """
    a = laplacian_matrix(problem)
    f = problem.source
    if problem.boundary is BoundaryCondition.DIRICHLET:
        bands = np.zeros((3, a.shape[0]))
        bands[0, 1:] = np.diag(a, 1)
        bands[1] = np.diag(a)
        bands[2, :-1] = np.diag(a, -1)
        u = solve_banded((1, 1), bands, f)
        return ClassicalSolution(u, float(np.linalg.norm(a @ u - f)), "none")

    mean = f.mean()
    if abs(mean) > NULL_TOL:
        if problem.boundary is BoundaryCondition.PERIODIC:
            raise SingularSystemError("periodic system needs a mean-zero source")
        log.warning("projecting Neumann source onto mean zero (mean was %.3g)", mean)
    f_proj = f - mean
    vals, vecs = eigh(a)
    keep = np.abs(vals) > NULL_TOL * max(1.0, np.abs(vals).max())
    inv = np.divide(1.0, vals, out=np.zeros_like(vals), where=keep)
    u = vecs @ (inv * (vecs.T @ f_proj))
    u -= u.mean()
    return ClassicalSolution(u, float(np.linalg.norm(a @ u - f_proj)), "mean-zero")


def compare_solutions(u_classical, u_quantum) -> dict[str, float]:
    """Squared normalized overlap (shape agreement) and relative L2 error (scale too)."""
    uc = np.asarray(u_classical, dtype=float)
    uq = np.asarray(u_quantum, dtype=float)
    if uc.shape != uq.shape:
        raise ValueError("solutions have different lengths")
    nc, nq = np.linalg.norm(uc), np.linalg.norm(uq)
    if nc == 0 or nq == 0:
        raise ValueError("cannot compare against a zero vector")
    overlap = min(float((uc @ uq / (nc * nq)) ** 2), 1.0)  # clip rounding spill
    return {"overlap": overlap, "l2_relative_error": float(np.linalg.norm(uc - uq) / nc)}


def gauge_like(reference: ClassicalSolution, u: np.ndarray) -> np.ndarray:
    """Apply the reference solution's gauge to ``u``."""
    u = np.asarray(u, dtype=float)
    return u - u.mean() if reference.gauge == "mean-zero" else u
