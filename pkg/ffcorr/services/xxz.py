"""
Spin-1/2 ferromagnetic XXZ chain with kink boundary conditions, written as a
sum of rank-1 projectors onto |phi(q)> = (q|10> - |01>)/sqrt(q^2 + 1), and its
closed-form gap, ground state and correlator.

|0> is spin up, |1> spin down; n = INF selects the infinite-chain limit.
"""
from __future__ import annotations

import logging
import math

import numpy as np

from ffcorr.errors import DomainError
from ffcorr.models import HamiltonianSpec, TermSpec

logger = logging.getLogger(__name__)

INF = math.inf


def _check_q(q: float, allow_one: bool = True) -> None:
    if q <= 0 or q > 1 or (q == 1 and not allow_one):
        upper = "1]" if allow_one else "1)"
        raise DomainError(f"q must lie in (0, {upper}, got {q}")


def _check_n(n) -> None:
    if n != INF and (int(n) != n or n < 2):
        raise DomainError(f"n must be an integer >= 2 or INF, got {n}")


def phi(q: float) -> np.ndarray:
    """Two-site amplitudes of |phi(q)> on |00>, |01>, |10>, |11>."""
    norm = math.sqrt(q * q + 1.0)
    return np.array([0.0, -1.0 / norm, q / norm, 0.0], dtype=complex)


def xxz_spec(q: float, n: int) -> HamiltonianSpec:
    _check_q(q)
    _check_n(n)
    if n == INF:
        raise DomainError("xxz_spec needs a finite chain")
    if q == 1:
        logger.warning("q = 1 is the isotropic ferromagnet: the gap closes as n grows")
    vector = phi(q)
    projector = np.outer(vector, vector.conj())
    terms = tuple(TermSpec(sites=(i, i + 1), matrix=projector) for i in range(1, n))
    return HamiltonianSpec(n=n, s=2, r=2, terms=terms)


def scaled_xxz_spec(q: float, n: int, a: float) -> HamiltonianSpec:
    """Non-projector variant with terms a|phi><phi|, same ground space as xxz_spec."""
    if not 0 < a <= 1:
        raise DomainError(f"scale a must lie in (0, 1], got {a}")
    spec = xxz_spec(q, n)
    terms = tuple(TermSpec(sites=term.sites, matrix=a * term.matrix, projector=False) for term in spec.terms)
    return spec.model_copy(update={"terms": terms})


def xxz_gap_closed_form(q: float, n=INF) -> float:
    """epsilon = 1 - 2 cos(pi/n) / (q + 1/q)."""
    _check_q(q)
    _check_n(n)
    cosine = 1.0 if n == INF else math.cos(math.pi / n)
    return 1.0 - 2.0 * cosine / (q + 1.0 / q)


def _weight(q: float, n) -> float:
    """(1 - q^2)/(1 - q^{2n}), with its q -> 1 and n -> INF limits."""
    if n == INF:
        return 1.0 - q * q
    if q == 1:
        return 1.0 / n
    return (1.0 - q * q) / (1.0 - q ** (2 * n))


def xxz_psi1(q: float, n: int) -> np.ndarray:
    """Ground state of the single-flip sector, amplitude ~ q^(j-1) on the flip at site j."""
    _check_q(q)
    _check_n(n)
    if n == INF:
        raise DomainError("xxz_psi1 needs a finite chain")
    psi = np.zeros(2 ** n, dtype=complex)
    prefactor = math.sqrt(_weight(q, n))
    for j in range(1, n + 1):
        psi[1 << (n - j)] = prefactor * q ** (j - 1)
    return psi


def xxz_correlator_closed_form(q: float, n, d: int) -> float:
    """((1 - q^2)/(1 - q^{2n}))^2 q^{2d} for number operators at sites 1 and 1 + d."""
    _check_q(q)
    _check_n(n)
    if d < 1 or (n != INF and d > n - 1):
        raise DomainError(f"distance {d} outside 1..n-1")
    return _weight(q, n) ** 2 * q ** (2 * d)


def xxz_xi_lower_bound(q: float) -> float:
    """1 / (-2 ln q): no correlation length below this fits the infinite-chain correlator."""
    _check_q(q, allow_one=False)
    return 1.0 / (-2.0 * math.log(q))


def magnetization(n: int) -> np.ndarray:
    """Diagonal of M = sum_i (1 - sigma^z_i)/2: number of 1s in each basis index."""
    index = np.arange(2 ** n)
    return sum((index >> k) & 1 for k in range(n)).astype(float)


def magnetization_sector(v: np.ndarray, tol: float = 1e-10) -> int | None:
    """Sector M of a vector lying in a single magnetization eigenspace, else None."""
    v = np.asarray(v)
    n = int(round(math.log2(v.shape[0])))
    diagonal = magnetization(n)
    weights = np.abs(v) ** 2
    support = weights > tol * tol
    sectors = np.unique(diagonal[support])
    if len(sectors) != 1:
        return None
    return int(sectors[0])
