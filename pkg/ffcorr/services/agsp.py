"""
Approximate ground-space projector Q_m(P^dag P), where

    Q_m(x) = T_m(2x/(1 - delta) - 1) / T_m(2/(1 - delta) - 1),  delta = eps/(g^2 + eps),

together with its scalar and operator error bounds 2 exp(-2 m sqrt(delta)) and the
causal-cone identity <psi|A (P^dag P)^m B|psi> = <psi|AB|psi> for m below
d(A, B)/((2c - 1)(r - 1)).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse.linalg import LinearOperator

from ffcorr.config import settings
from ffcorr.errors import DegenerateRangeError, PreconditionError
from ffcorr.models import (
    AgspRow,
    CausalConeReport,
    ChebyshevParams,
    ConeRow,
    CorrelatorBoundReport,
    GroundSpaceBasis,
    HamiltonianSpec,
    LayerSchedule,
    LocalObservable,
    ScalarBoundRow,
)
from ffcorr.services.correlation import correlator_deg
from ffcorr.services.detectability import build_P, gap_delta, greedy_color
from ffcorr.services.hamiltonian import interaction_graph
from ffcorr.services.linalg import affine, apply_local
from ffcorr.services.spectral import extremal_eigs, ground_space

logger = logging.getLogger(__name__)


# ── Scalar polynomials ───────────────────────────────────────────────────────

def chebyshev_T(m: int, x):
    """T_m(x) by the three-term recurrence; accepts scalars and arrays."""
    if m < 0:
        raise PreconditionError(f"degree must be non-negative, got {m}")
    x = np.asarray(x, dtype=float)
    previous, current = np.ones_like(x), x
    if m == 0:
        current = previous
    for _ in range(m - 1):
        previous, current = current, 2.0 * x * current - previous
    return float(current) if current.ndim == 0 else current


def qm_eval(params: ChebyshevParams, x):
    """Q_m(x); Q_m(1) = 1 and |Q_m| <= 2 exp(-2 m sqrt(delta)) on [0, 1 - delta]."""
    argument = 2.0 * np.asarray(x, dtype=float) / (1.0 - params.delta) - 1.0
    value = chebyshev_T(params.m, argument) / params.normalization
    return float(value) if np.ndim(value) == 0 else value


def scalar_bound_check(m_max: int, delta_grid: Sequence[float], points: int = 10_000,
                       tol: float | None = None) -> list[ScalarBoundRow]:
    """max |Q_m| over a uniform grid of [0, 1 - delta] against the bound, for m = 0..m_max."""
    tol = settings.bound_tol if tol is None else tol
    rows = []
    for delta in delta_grid:
        x = np.linspace(0.0, 1.0 - delta, points)
        for m in range(m_max + 1):
            params = ChebyshevParams(m=m, delta=delta)
            max_abs = float(np.max(np.abs(qm_eval(params, x))))
            rows.append(ScalarBoundRow(m=m, delta=delta, max_abs=max_abs, bound=params.bound,
                                       passed=max_abs <= params.bound + tol))
    return rows


# ── Operator polynomial ──────────────────────────────────────────────────────

class ChebyshevOperator(LinearOperator):
    """Q_m(X) for a Hermitian X with spectrum in [0, 1], applied by the recurrence on 2X/(1-delta) - 1."""

    def __init__(self, X: LinearOperator, params: ChebyshevParams):
        self.X = X
        self.params = params
        self.shifted = affine(-1.0, 2.0 / (1.0 - params.delta), X)
        self.norm = params.normalization
        super().__init__(dtype=np.complex128, shape=X.shape)

    def _matmat(self, V):
        V = np.asarray(V, dtype=complex)
        if self.params.m == 0:
            return V / self.norm
        previous, current = V, self.shifted.matmat(V)
        for _ in range(self.params.m - 1):
            previous, current = current, 2.0 * self.shifted.matmat(current) - previous
        return current / self.norm

    def _matvec(self, v):
        return self._matmat(np.reshape(v, (-1, 1))).ravel()

    def _adjoint(self):
        return self


@dataclass(frozen=True)
class AgspContext:
    """Everything Q_m(P^dag P) depends on besides m."""
    spec: HamiltonianSpec
    schedule: LayerSchedule
    basis: GroundSpaceBasis
    g: int
    delta: float
    PP: LinearOperator


def agsp_context(spec: HamiltonianSpec, schedule: LayerSchedule | None = None,
                 seed: int | None = None) -> AgspContext:
    """delta from the measured gap and the interaction-graph degree, and P^dag P."""
    graph = interaction_graph(spec)
    schedule = greedy_color(graph) if schedule is None else schedule
    basis = ground_space(spec, seed=seed)
    P = build_P(spec, schedule)
    delta = gap_delta(basis.gap, graph.g)
    logger.debug("agsp context: eps=%.12g g=%d delta=%.12g", basis.gap, graph.g, delta)
    return AgspContext(spec=spec, schedule=schedule, basis=basis, g=graph.g, delta=delta, PP=P.H @ P)


def agsp_operator(spec: HamiltonianSpec, schedule: LayerSchedule | None, m: int,
                  context: AgspContext | None = None) -> ChebyshevOperator:
    context = agsp_context(spec, schedule) if context is None else context
    return ChebyshevOperator(context.PP, ChebyshevParams(m=m, delta=context.delta))


def agsp_apply(spec: HamiltonianSpec, schedule: LayerSchedule | None, m: int, v: np.ndarray,
               context: AgspContext | None = None) -> np.ndarray:
    """Q_m(P^dag P) v; ground states are fixed points."""
    v = np.asarray(v, dtype=complex)
    if v.shape[0] != spec.dim:
        raise PreconditionError(f"dimension mismatch: vector of length {v.shape[0]}, expected {spec.dim}")
    return agsp_operator(spec, schedule, m, context).matvec(v)


def agsp_sweep(spec: HamiltonianSpec, schedule: LayerSchedule | None, m_grid: Sequence[int],
               tol: float | None = None, seed: int | None = None) -> list[AgspRow]:
    """||Q_m(P^dag P) - G|| against 2 exp(-2 m sqrt(delta)) for every m in the grid."""
    tol = settings.bound_tol if tol is None else tol
    context = agsp_context(spec, schedule, seed)
    G = context.basis.projector()
    rows = []
    for m in m_grid:
        Q = agsp_operator(spec, context.schedule, m, context)
        low, high = extremal_eigs(Q - G, spec.dim, seed=seed)
        measured = max(abs(low), abs(high))
        bound = Q.params.bound
        passed = measured <= bound + tol
        if not passed:
            logger.warning("m=%d: ||Q_m - G|| = %.12g above bound %.12g", m, measured, bound)
        rows.append(AgspRow(m=m, delta=context.delta, bound=bound, measured_norm=measured,
                            margin=bound - measured, passed=passed))
    return rows


# ── Causal cone ──────────────────────────────────────────────────────────────

def max_m_for_distance(d: int, c: int, r: int) -> int:
    """Largest integer m with m < d/((2c - 1)(r - 1))."""
    if r == 1:
        raise DegenerateRangeError("range r = 1: single-site terms, the identity holds for every m")
    if d < 1 or c < 1 or r < 1:
        raise PreconditionError(f"need d >= 1, c >= 1, r >= 2; got d={d}, c={c}, r={r}")
    return (d - 1) // ((2 * c - 1) * (r - 1))


def _check_disjoint(A: LocalObservable, B: LocalObservable) -> None:
    if set(A.sites) & set(B.sites):
        raise PreconditionError(f"observables overlap: {A.sites} and {B.sites}")


def causal_cone_check(spec: HamiltonianSpec, schedule: LayerSchedule | None, A: LocalObservable,
                      B: LocalObservable, m_max: int, tol: float | None = None,
                      seed: int | None = None) -> CausalConeReport:
    """
    Compare <psi|A (P^dag P)^m B|psi> with <psi|AB|psi> for every ground-basis
    vector and m = 0..m_max + 3. Rows with m up to min(m_max, admissible m) must
    hold; the rest only locate where the identity first breaks.
    """
    tol = settings.cone_tol if tol is None else tol
    _check_disjoint(A, B)
    graph = interaction_graph(spec)
    schedule = greedy_color(graph) if schedule is None else schedule
    distance = spec.distance(A.sites, B.sites)
    admissible = max_m_for_distance(distance, schedule.c, spec.r)
    basis = ground_space(spec, seed=seed)
    P = build_P(spec, schedule)
    PP = P.H @ P

    A_dag = A.matrix.conj().T
    left = apply_local(A_dag, A.sites, spec.n, spec.s, basis.vectors)
    right = apply_local(B.matrix, B.sites, spec.n, spec.s, basis.vectors)
    reference = np.einsum("ij,ij->j", left.conj(), right)

    rows: list[ConeRow] = []
    first_failure = None
    for m in range(m_max + 4):
        values = np.einsum("ij,ij->j", left.conj(), right)
        residuals = np.abs(values - reference)
        guaranteed = m <= min(m_max, admissible)
        for index, residual in enumerate(residuals):
            rows.append(ConeRow(m=m, state_index=index, residual=float(residual),
                                guaranteed=guaranteed, holds=bool(residual <= tol)))
        if first_failure is None and residuals.max() > tol:
            first_failure = m
        right = PP.matmat(right)

    passed = all(row.holds for row in rows if row.guaranteed)
    logger.debug("causal cone: d=%d admissible m=%d first failure %s", distance, admissible, first_failure)
    return CausalConeReport(distance=distance, c=schedule.c, r=spec.r, m_admissible=admissible,
                            rows=rows, passed=passed, first_failure_m=first_failure)


def correlator_bound_check(spec: HamiltonianSpec, schedule: LayerSchedule | None, A: LocalObservable,
                           B: LocalObservable, psi: np.ndarray | None = None, tol: float | None = None,
                           seed: int | None = None) -> CorrelatorBoundReport:
    """
    |<psi|AB|psi> - <psi|AGB|psi>| <= 2 ||A|| ||B|| exp(-2 m sqrt(delta)) at the largest
    admissible m. Without psi, the worst ground-basis vector is reported.
    """
    tol = settings.bound_tol if tol is None else tol
    _check_disjoint(A, B)
    context = agsp_context(spec, schedule, seed)
    distance = spec.distance(A.sites, B.sites)
    m = max_m_for_distance(distance, context.schedule.c, spec.r)
    states = [psi] if psi is not None else list(context.basis.vectors.T)
    correlator = max(correlator_deg(spec, state, A, B, basis=context.basis) for state in states)
    bound = 2.0 * A.norm * B.norm * math.exp(-2.0 * m * math.sqrt(context.delta))
    return CorrelatorBoundReport(m=m, distance=distance, correlator=correlator, bound=bound,
                                 passed=correlator <= bound + tol)
