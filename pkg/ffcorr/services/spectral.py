"""
Eigenpairs of Hermitian maps: ground space, degeneracy and spectral gap.

Below the dense threshold the map is materialized and handed to LAPACK;
above it, eigenpairs come one at a time from Lanczos runs with full
reorthogonalization, each run deflating the pairs already locked so that
degenerate eigenvalues are resolved.
"""
from __future__ import annotations

import logging
import math

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import LinearOperator

from ffcorr.config import settings
from ffcorr.errors import (
    ConvergenceError,
    InconsistencyError,
    NotFrustrationFreeError,
    NotHermitianError,
    PreconditionError,
)
from ffcorr.models import Eigenpairs, GapRatioReport, GroundSpaceBasis, HamiltonianSpec
from ffcorr.services.hamiltonian import projectorize_spec
from ffcorr.services.linalg import (
    apply_local,
    dense_materialize,
    hamiltonian_operator,
    hermiticity_defect,
    random_state,
    run_with_restarts,
)

logger = logging.getLogger(__name__)


def _check_hermitian(M: LinearOperator, dim: int, seed: int | None) -> None:
    defect = hermiticity_defect(M, dim, seed)
    if defect > settings.bound_tol:
        raise NotHermitianError(f"map is not Hermitian: |<w,Mv> - <Mw,v>| = {defect:.3e}")


def _dense_lowest(M: LinearOperator, dim: int, k: int, threshold: int) -> Eigenpairs:
    A = dense_materialize(M, dim, threshold)
    A = 0.5 * (A + A.conj().T)
    values, vectors = scipy.linalg.eigh(A, subset_by_index=[0, k - 1])
    residuals = np.linalg.norm(A @ vectors - vectors * values, axis=0)
    return Eigenpairs(values=values, vectors=vectors, residuals=tuple(float(r) for r in residuals), method="dense")


def _lanczos_single(M: LinearOperator, dim: int, locked: np.ndarray, tol: float,
                    max_iter: int, rng: np.random.Generator) -> tuple[float, np.ndarray, float]:
    """Lowest eigenpair of M on the orthogonal complement of ``locked``."""

    def deflate(x):
        if locked.shape[1] == 0:
            return x
        return x - locked @ (locked.conj().T @ x)

    q = deflate(random_state(dim, rng))
    basis = [q / np.linalg.norm(q)]
    alphas: list[float] = []
    betas: list[float] = []
    cap = min(max_iter, dim - locked.shape[1])

    for step in range(cap):
        w = deflate(M.matvec(basis[step]))
        alphas.append(float(np.real(np.vdot(basis[step], w))))
        Q = np.column_stack(basis)
        for _ in range(2):
            w = deflate(w - Q @ (Q.conj().T @ w))
        beta = float(np.linalg.norm(w))

        if step == 0:
            theta, S = np.array(alphas), np.ones((1, 1))
        else:
            theta, S = scipy.linalg.eigh_tridiagonal(np.array(alphas), np.array(betas))
        ritz_residual = beta * abs(S[-1, 0])
        exhausted = beta <= 1e-14 or step + 1 == cap
        if ritz_residual <= 0.1 * tol or exhausted:
            vector = deflate(Q @ S[:, 0])
            vector = vector / np.linalg.norm(vector)
            value = float(theta[0])
            residual = float(np.linalg.norm(M.matvec(vector) - value * vector))
            logger.debug("lanczos: krylov size %d, value %.12g, residual %.2e", step + 1, value, residual)
            if residual > tol:
                raise ConvergenceError(
                    f"Lanczos stopped at Krylov size {step + 1} without reaching tolerance {tol:.1e}",
                    residuals=[residual],
                )
            return value, vector, residual
        betas.append(beta)
        basis.append(w / beta)

    raise ConvergenceError("Lanczos received an empty Krylov space")


def _lanczos_lowest(M: LinearOperator, dim: int, k: int, tol: float, max_iter: int, seed: int) -> Eigenpairs:
    rng = np.random.default_rng(seed)
    locked = np.zeros((dim, 0), dtype=complex)
    values, residuals = [], []
    for _ in range(k):
        value, vector, residual = _lanczos_single(M, dim, locked, tol, max_iter, rng)
        values.append(value)
        residuals.append(residual)
        locked = np.column_stack([locked, vector])
    order = np.argsort(values, kind="stable")
    return Eigenpairs(
        values=np.array(values)[order],
        vectors=locked[:, order],
        residuals=tuple(residuals[i] for i in order),
        method="lanczos",
    )


def lowest_eigenpairs(M: LinearOperator, dim: int, k: int, tol: float | None = None,
                      dense_threshold: int | None = None, max_iter: int | None = None,
                      seed: int | None = None) -> Eigenpairs:
    """The k smallest eigenvalues of a Hermitian map with orthonormal eigenvectors."""
    tol = settings.lanczos_tol if tol is None else tol
    threshold = settings.dense_threshold if dense_threshold is None else dense_threshold
    max_iter = settings.lanczos_max_iter if max_iter is None else max_iter
    if not 1 <= k <= dim:
        raise PreconditionError(f"k = {k} outside 1..{dim}")
    _check_hermitian(M, dim, seed)

    if dim <= threshold:
        return _dense_lowest(M, dim, k, threshold)
    return run_with_restarts(lambda attempt_seed: _lanczos_lowest(M, dim, k, tol, max_iter, attempt_seed), seed)


def extremal_eigs(M: LinearOperator, dim: int, tol: float | None = None,
                  dense_threshold: int | None = None, seed: int | None = None) -> tuple[float, float]:
    """(lambda_min, lambda_max) of a Hermitian map."""
    threshold = settings.dense_threshold if dense_threshold is None else dense_threshold
    if dim <= threshold:
        _check_hermitian(M, dim, seed)
        A = dense_materialize(M, dim, threshold)
        values = scipy.linalg.eigvalsh(0.5 * (A + A.conj().T))
        return float(values[0]), float(values[-1])
    lowest = lowest_eigenpairs(M, dim, 1, tol, threshold, seed=seed)
    highest = lowest_eigenpairs(-1.0 * M, dim, 1, tol, threshold, seed=seed)
    return float(lowest.values[0]), float(-highest.values[0])


def default_zero_tol(spec: HamiltonianSpec) -> float:
    return settings.zero_tol_per_term * max(1, len(spec.terms))


def ground_space(spec: HamiltonianSpec, zero_tol: float | None = None,
                 dense_threshold: int | None = None, seed: int | None = None) -> GroundSpaceBasis:
    """
    All zero-energy eigenvectors of H and the gap above them.

    The number of eigenpairs requested doubles until one lies above zero_tol,
    so the degeneracy is measured rather than assumed.
    """
    zero_tol = default_zero_tol(spec) if zero_tol is None else zero_tol
    H = hamiltonian_operator(spec)
    dim = spec.dim
    k = min(dim, 8)
    while True:
        pairs = lowest_eigenpairs(H, dim, k, dense_threshold=dense_threshold, seed=seed)
        if pairs.values[-1] > zero_tol or k == dim:
            break
        k = min(dim, 2 * k)

    degeneracy = int(np.count_nonzero(pairs.values <= zero_tol))
    if degeneracy == 0:
        raise NotFrustrationFreeError(
            f"ground energy {pairs.values[0]:.6g} > zero tolerance {zero_tol:.1e}: Hamiltonian is frustrated"
        )
    gap = float(pairs.values[degeneracy]) if degeneracy < len(pairs.values) else math.inf
    vectors, _ = np.linalg.qr(pairs.vectors[:, :degeneracy])

    for index, term in enumerate(spec.terms):
        residuals = np.linalg.norm(apply_local(term.matrix, term.sites, spec.n, spec.s, vectors), axis=0)
        worst = float(residuals.max())
        if worst > settings.zero_tol_per_term:
            raise InconsistencyError(
                f"term {index} does not annihilate the zero-energy space (residual {worst:.3e})"
            )

    logger.debug("ground space: degeneracy %d, gap %.12g", degeneracy, gap)
    return GroundSpaceBasis(vectors=vectors, degeneracy=degeneracy, gap=gap, zero_tol=zero_tol)


def gap_ratio_check(spec: HamiltonianSpec, tol: float | None = None) -> GapRatioReport:
    """Gaps of H and of its projectorized H' satisfy a * eps' <= eps <= eps'."""
    tol = settings.bound_tol if tol is None else tol
    epsilon = ground_space(spec).gap
    projected, a = projectorize_spec(spec)
    epsilon_projector = ground_space(projected).gap
    passed = a * epsilon_projector - tol <= epsilon <= epsilon_projector + tol
    return GapRatioReport(a=a, epsilon=epsilon, epsilon_projector=epsilon_projector, passed=passed)
