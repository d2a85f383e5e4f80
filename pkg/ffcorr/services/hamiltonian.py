"""
Validation and preprocessing of frustration-free Hamiltonian specifications:
invariant checks, projectorization of terms, and the interaction graph.
"""
from __future__ import annotations

import logging
from itertools import combinations

import networkx as nx
import numpy as np
import scipy.linalg

from ffcorr.config import settings
from ffcorr.errors import NotPSDError
from ffcorr.models import (
    HamiltonianSpec,
    InteractionGraph,
    LocalObservable,
    TermSpec,
    ValidationReport,
    Violation,
    ViolationKind,
)
from ffcorr.services.linalg import apply_local

logger = logging.getLogger(__name__)


def validate_spec(spec: HamiltonianSpec, tol: float | None = None) -> ValidationReport:
    """
    Check every term against the model assumptions: Hermitian, smallest
    eigenvalue zero, norm at most one, diameter within the range, distinct
    supports, and idempotent when flagged as a projector.
    """
    tol = settings.term_tol if tol is None else tol
    violations: list[Violation] = []
    supports: dict[frozenset[int], int] = {}

    for index, term in enumerate(spec.terms):
        H = term.matrix
        asymmetry = float(np.linalg.norm(H - H.conj().T))
        if asymmetry > tol:
            violations.append(Violation(
                term_index=index, kind=ViolationKind.NOT_HERMITIAN,
                detail=f"||H - H^dag||_F = {asymmetry:.3e}",
            ))
        eigenvalues = scipy.linalg.eigvalsh(0.5 * (H + H.conj().T))
        if abs(eigenvalues[0]) > tol:
            violations.append(Violation(
                term_index=index, kind=ViolationKind.MIN_EIGENVALUE,
                detail=f"smallest eigenvalue {eigenvalues[0]:.6g} != 0",
            ))
        norm = float(np.max(np.abs(eigenvalues)))
        if norm > 1.0 + tol:
            violations.append(Violation(
                term_index=index, kind=ViolationKind.NORM, detail=f"||H_i|| = {norm:.6g} > 1",
            ))
        diameter = spec.diameter(term.sites)
        if diameter > spec.r:
            violations.append(Violation(
                term_index=index, kind=ViolationKind.DIAMETER,
                detail=f"support diameter {diameter} exceeds range {spec.r}",
            ))
        key = frozenset(term.sites)
        if key in supports:
            violations.append(Violation(
                term_index=index, kind=ViolationKind.DUPLICATE_SUPPORT,
                detail=f"support {sorted(key)} already used by term {supports[key]}",
            ))
        else:
            supports[key] = index
        if term.projector:
            defect = float(np.linalg.norm(H @ H - H))
            if defect > tol:
                violations.append(Violation(
                    term_index=index, kind=ViolationKind.NOT_PROJECTOR,
                    detail=f"||H^2 - H||_F = {defect:.3e}",
                ))

    return ValidationReport(valid=not violations, violations=violations)


def projectorize_term(term: TermSpec, tol: float | None = None) -> tuple[TermSpec, float]:
    """
    Projector onto the range of a PSD term, and a = its smallest nonzero
    eigenvalue, so that a * Pi <= H <= Pi.
    """
    tol = settings.term_tol if tol is None else tol
    H = term.matrix
    eigenvalues, eigenvectors = scipy.linalg.eigh(H)
    if eigenvalues[0] < -tol:
        raise NotPSDError(f"term on sites {term.sites} has eigenvalue {eigenvalues[0]:.6g} < 0")
    if np.linalg.norm(H @ H - H) <= tol:
        return term, 1.0

    keep = eigenvalues > tol
    V = eigenvectors[:, keep]
    a = float(eigenvalues[keep].min()) if keep.any() else 1.0
    return TermSpec(sites=term.sites, matrix=V @ V.conj().T, projector=True), a


def projectorize_spec(spec: HamiltonianSpec, tol: float | None = None) -> tuple[HamiltonianSpec, float]:
    """H' = sum_i Pi_i and the common constant a = min_i a_i."""
    terms, scales = [], []
    for term in spec.terms:
        projected, a = projectorize_term(term, tol)
        terms.append(projected)
        scales.append(a)
    a = min(scales, default=1.0)
    return spec.model_copy(update={"terms": tuple(terms)}), a


def embed_on(term: TermSpec, sites: list[int], s: int) -> np.ndarray:
    """Dense matrix of a term on the tensor factor of ``sites`` (ascending order)."""
    local = [sites.index(site) + 1 for site in term.sites]
    size = s ** len(sites)
    return apply_local(term.matrix, local, len(sites), s, np.eye(size, dtype=complex))


def commutator_norm(first: TermSpec, second: TermSpec, s: int) -> float:
    """||[H_i, H_j]||_F on the joint support; zero for disjoint supports."""
    if not set(first.sites) & set(second.sites):
        return 0.0
    joint = sorted(set(first.sites) | set(second.sites))
    A, B = embed_on(first, joint, s), embed_on(second, joint, s)
    return float(np.linalg.norm(A @ B - B @ A))


def interaction_graph(spec: HamiltonianSpec, commutator_tol: float | None = None) -> InteractionGraph:
    """Vertices are terms, edges join pairs whose commutator exceeds the tolerance."""
    commutator_tol = settings.commutator_tol if commutator_tol is None else commutator_tol
    graph = nx.Graph()
    graph.add_nodes_from(range(len(spec.terms)))
    for i, j in combinations(range(len(spec.terms)), 2):
        if commutator_norm(spec.terms[i], spec.terms[j], spec.s) > commutator_tol:
            graph.add_edge(i, j)

    g = max((degree for _, degree in graph.degree), default=0)
    logger.debug("interaction graph: %d terms, %d edges, g=%d", graph.number_of_nodes(), graph.number_of_edges(), g)
    return InteractionGraph(n_terms=len(spec.terms), edges=tuple(sorted((min(e), max(e)) for e in graph.edges)), g=g)


# ── Default observables ──────────────────────────────────────────────────────

def number_operator(site: int) -> LocalObservable:
    """(1 - sigma^z)/2 on one spin-1/2 site."""
    return LocalObservable(sites=(site,), matrix=np.diag([0.0, 1.0]), label=f"n{site}")


def pauli_z(site: int) -> LocalObservable:
    return LocalObservable(sites=(site,), matrix=np.diag([1.0, -1.0]), label=f"Z{site}")


def identity_observable(site: int, s: int = 2) -> LocalObservable:
    return LocalObservable(sites=(site,), matrix=np.eye(s), label=f"I{site}")
