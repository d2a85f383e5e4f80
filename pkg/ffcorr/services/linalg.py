"""
Matrix-free linear maps on the s^n-dimensional state space.

Basis convention: site 1 is the most significant digit in base s, so a state
vector reshaped to ``(s,) * n`` has site j on axis j - 1. All maps are
``scipy.sparse.linalg.LinearOperator`` instances, composed with ``@`` (right
to left, as on kets), ``+``, scalar ``*`` and ``.H``.
"""
from __future__ import annotations

import logging
import math
from functools import reduce
from operator import add, matmul
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, aslinearoperator
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from ffcorr.config import settings
from ffcorr.errors import ConvergenceError, DenseLimitError, PreconditionError
from ffcorr.models import HamiltonianSpec, NormEstimate, TermSpec

logger = logging.getLogger(__name__)


def site_count(dim: int, s: int) -> int:
    """Number of sites n with s**n == dim."""
    n = round(math.log(dim) / math.log(s)) if dim > 1 else 0
    if s ** n != dim:
        raise PreconditionError(f"dimension mismatch: {dim} is not a power of {s}")
    return n


def apply_local(matrix: np.ndarray, sites: Sequence[int], n: int, s: int, x: np.ndarray) -> np.ndarray:
    """(matrix on ``sites``) ⊗ 1_rest applied to a vector or to the columns of a block."""
    x = np.asarray(x)
    if x.shape[0] != s ** n:
        raise PreconditionError(f"dimension mismatch: vector of length {x.shape[0]}, expected {s ** n}")
    k = len(sites)
    axes = [site - 1 for site in sites]
    tensor = x.reshape((s,) * n + x.shape[1:])
    tensor = np.moveaxis(tensor, axes, list(range(k)))
    moved_shape = tensor.shape
    out = (matrix @ tensor.reshape(s ** k, -1)).reshape(moved_shape)
    return np.moveaxis(out, list(range(k)), axes).reshape(x.shape)


class LocalOperator(LinearOperator):
    """A dense matrix on a few sites embedded into the full chain."""

    def __init__(self, matrix: np.ndarray, sites: Sequence[int], n: int, s: int = 2):
        self.matrix = np.asarray(matrix, dtype=complex)
        self.sites = tuple(sites)
        self.n = n
        self.s = s
        super().__init__(dtype=np.complex128, shape=(s ** n, s ** n))

    def _matvec(self, x):
        return apply_local(self.matrix, self.sites, self.n, self.s, np.ravel(x))

    def _matmat(self, X):
        return apply_local(self.matrix, self.sites, self.n, self.s, X)

    def _adjoint(self):
        return LocalOperator(self.matrix.conj().T, self.sites, self.n, self.s)


class BasisProjector(LinearOperator):
    """Orthogonal projector V V^dag onto the span of orthonormal columns V."""

    def __init__(self, vectors: np.ndarray):
        self.vectors = np.asarray(vectors, dtype=complex)
        dim = self.vectors.shape[0]
        super().__init__(dtype=np.complex128, shape=(dim, dim))

    def _matvec(self, x):
        x = np.ravel(x)
        return self.vectors @ (self.vectors.conj().T @ x)

    def _matmat(self, X):
        return self.vectors @ (self.vectors.conj().T @ X)

    def _adjoint(self):
        return self


def identity(dim: int) -> LinearOperator:
    return aslinearoperator(sp.identity(dim, dtype=np.complex128, format="csr"))


def zero(dim: int) -> LinearOperator:
    return aslinearoperator(sp.csr_matrix((dim, dim), dtype=np.complex128))


def affine(alpha: complex, beta: complex, M: LinearOperator) -> LinearOperator:
    """alpha * 1 + beta * M."""
    return alpha * identity(M.shape[0]) + beta * M


def product(factors: Sequence[LinearOperator], dim: int) -> LinearOperator:
    """factors[0] @ factors[1] @ ... ; the last factor acts first."""
    if not factors:
        return identity(dim)
    return reduce(matmul, factors)


def total(terms: Sequence[LinearOperator], dim: int) -> LinearOperator:
    if not terms:
        return zero(dim)
    return reduce(add, terms)


def term_operator(term: TermSpec, spec: HamiltonianSpec) -> LocalOperator:
    return LocalOperator(term.matrix, term.sites, spec.n, spec.s)


def complement_operator(term: TermSpec, spec: HamiltonianSpec) -> LocalOperator:
    """1 - H_i, embedded."""
    size = term.matrix.shape[0]
    return LocalOperator(np.eye(size) - term.matrix, term.sites, spec.n, spec.s)


def hamiltonian_operator(spec: HamiltonianSpec) -> LinearOperator:
    return total([term_operator(term, spec) for term in spec.terms], spec.dim)


def apply_local_term(term: TermSpec, v: np.ndarray, s: int = 2) -> np.ndarray:
    """(H_i ⊗ 1_rest) v without building the global matrix."""
    v = np.asarray(v)
    n = site_count(v.shape[0], s)
    if max(term.sites) > n:
        raise PreconditionError(f"term sites {term.sites} exceed the {n}-site state")
    return apply_local(term.matrix, term.sites, n, s, v)


def apply_hamiltonian(spec: HamiltonianSpec, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    if v.shape[0] != spec.dim:
        raise PreconditionError(f"dimension mismatch: vector of length {v.shape[0]}, expected {spec.dim}")
    out = np.zeros(v.shape, dtype=complex)
    for term in spec.terms:
        out += apply_local(term.matrix, term.sites, spec.n, spec.s, v)
    return out


def dense_materialize(M: LinearOperator, dim: int, threshold: int | None = None) -> np.ndarray:
    """Dense matrix of M, column j being M applied to basis vector j."""
    threshold = settings.dense_threshold if threshold is None else threshold
    if dim > threshold:
        raise DenseLimitError(f"refusing to materialize dimension {dim} (dense threshold {threshold})")
    return np.asarray(M.matmat(np.eye(dim, dtype=complex)))


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def adjoint_defect(M: LinearOperator, dim: int, seed: int | None = None) -> float:
    """|<w, M v> - conj(<v, M^dag w>)| for random unit v, w."""
    rng = np.random.default_rng(settings.default_seed if seed is None else seed)
    v, w = random_state(dim, rng), random_state(dim, rng)
    return float(abs(np.vdot(w, M.matvec(v)) - np.conj(np.vdot(v, M.H.matvec(w)))))


def hermiticity_defect(M: LinearOperator, dim: int, seed: int | None = None) -> float:
    """|<w, M v> - <M w, v>| for random unit v, w; zero iff M is Hermitian."""
    rng = np.random.default_rng(settings.default_seed if seed is None else seed)
    v, w = random_state(dim, rng), random_state(dim, rng)
    return float(abs(np.vdot(w, M.matvec(v)) - np.vdot(M.matvec(w), v)))


def run_with_restarts(solve: Callable[[int], object], seed: int | None = None):
    """Call ``solve(seed)``; on ConvergenceError retry with the next seed."""
    seed = settings.default_seed if seed is None else seed
    for attempt in Retrying(
        stop=stop_after_attempt(settings.solver_attempts),
        retry=retry_if_exception_type(ConvergenceError),
        reraise=True,
    ):
        with attempt:
            attempt_seed = seed + attempt.retry_state.attempt_number - 1
            if attempt.retry_state.attempt_number > 1:
                logger.debug("restarting solver with seed %d", attempt_seed)
            return solve(attempt_seed)


def _power_iteration(M: LinearOperator, dim: int, tol: float, max_iter: int, seed: int) -> NormEstimate:
    rng = np.random.default_rng(seed)
    h = random_state(dim, rng)
    adjoint = M.H
    previous = None
    current = 0.0
    for iteration in range(1, max_iter + 1):
        w = adjoint.matvec(M.matvec(h))
        current = float(np.linalg.norm(w))
        if current == 0.0:
            return NormEstimate(value=0.0, iterations=iteration)
        h = w / current
        if previous is not None and abs(current - previous) <= tol * current:
            logger.debug("power iteration converged after %d steps", iteration)
            return NormEstimate(value=math.sqrt(current), iterations=iteration)
        previous = current
    raise ConvergenceError(
        f"power iteration did not converge within {max_iter} steps",
        last_iterates=(math.sqrt(previous or 0.0), math.sqrt(current)),
    )


def operator_norm(M: LinearOperator, dim: int, tol: float | None = None,
                  max_iter: int | None = None, seed: int | None = None) -> NormEstimate:
    """Largest singular value of M by power iteration on M^dag M."""
    tol = settings.power_tol if tol is None else tol
    max_iter = settings.power_max_iter if max_iter is None else max_iter
    return run_with_restarts(lambda attempt_seed: _power_iteration(M, dim, tol, max_iter, attempt_seed), seed)
