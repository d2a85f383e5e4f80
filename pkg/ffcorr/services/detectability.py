"""
Detectability-lemma operator P = L_c ... L_1 built from layers of commuting
complements (1 - H_i), the norm ||P - G|| and its bound 1/sqrt(1 + eps/g^2).
"""
from __future__ import annotations

import logging
import math
from itertools import combinations
from typing import Sequence

import networkx as nx
import scipy.linalg
from scipy.sparse.linalg import LinearOperator

from ffcorr.config import settings
from ffcorr.errors import ScheduleMismatchError
from ffcorr.models import DLReport, HamiltonianSpec, InteractionGraph, LayerSchedule, RemarkRow
from ffcorr.services.hamiltonian import commutator_norm, interaction_graph
from ffcorr.services.linalg import complement_operator, dense_materialize, product
from ffcorr.services.spectral import extremal_eigs, ground_space
from ffcorr.services.xxz import xxz_spec
from ffcorr.workers.pool import ordered_map

logger = logging.getLogger(__name__)


def _ascending(graph, colors):
    return sorted(graph)


def greedy_color(graph: InteractionGraph) -> LayerSchedule:
    """Smallest free color per term, visiting terms in ascending index. c <= g + 1."""
    coloring = nx.greedy_color(graph.to_networkx(), strategy=_ascending)
    assignment = tuple(coloring[index] + 1 for index in range(graph.n_terms))
    c = max(assignment, default=1)
    return LayerSchedule(c=c, assignment=assignment)


def check_schedule(spec: HamiltonianSpec, schedule: LayerSchedule) -> None:
    if len(schedule.assignment) != len(spec.terms):
        raise ScheduleMismatchError(
            f"schedule colors {len(schedule.assignment)} terms, spec has {len(spec.terms)}"
        )
    if sorted(schedule.order) != list(range(1, schedule.c + 1)):
        raise ScheduleMismatchError(f"layer order {schedule.order} is not a permutation of 1..{schedule.c}")
    for index, color in enumerate(schedule.assignment):
        if not 1 <= color <= schedule.c:
            raise ScheduleMismatchError(f"term {index} has color {color} outside 1..{schedule.c}")
    for color in range(1, schedule.c + 1):
        for i, j in combinations(schedule.layer(color), 2):
            if commutator_norm(spec.terms[i], spec.terms[j], spec.s) > settings.commutator_tol:
                raise ScheduleMismatchError(f"terms {i} and {j} share layer {color} but do not commute")


def layer_operator(spec: HamiltonianSpec, indices: Sequence[int]) -> LinearOperator:
    """L = prod over the layer of (1 - H_i); lowest index acts first."""
    factors = [complement_operator(spec.terms[i], spec) for i in sorted(indices, reverse=True)]
    return product(factors, spec.dim)


def build_P(spec: HamiltonianSpec, schedule: LayerSchedule) -> LinearOperator:
    """Layers act on kets in ``schedule.order``; the default gives P = L_c ... L_1."""
    check_schedule(spec, schedule)
    layers = [layer_operator(spec, schedule.layer(color)) for color in reversed(schedule.order)]
    return product(layers, spec.dim)


def dl_bound(epsilon: float, g: int) -> float:
    """1/sqrt(1 + eps/g^2); zero when the terms all commute or the gap is infinite."""
    if g == 0 or math.isinf(epsilon):
        return 0.0
    return 1.0 / math.sqrt(1.0 + epsilon / g ** 2)


def gap_delta(epsilon: float, g: int) -> float:
    """delta = eps/(g^2 + eps)."""
    if math.isinf(epsilon):
        return 1.0
    return epsilon / (g ** 2 + epsilon)


def _difference_norm(D: LinearOperator, dim: int, pp_max: float) -> float:
    """||D||, the value linalg.operator_norm estimates by power iteration."""
    # sqrt(pp_max) keeps only half the digits when P is close to G
    if dim <= settings.dense_threshold:
        return float(scipy.linalg.svdvals(dense_materialize(D, dim))[0])
    return math.sqrt(max(pp_max, 0.0))


def dl_check(spec: HamiltonianSpec, schedule: LayerSchedule | None = None, tol: float | None = None,
             seed: int | None = None) -> DLReport:
    """
    Measure ||P - G|| against the detectability-lemma bound and check
    0 <= P^dag P - G <= (1 - delta) 1 through its extremal eigenvalues.

    Since P G = G P = G, (P - G)^dag (P - G) = P^dag P - G and the norm is the
    square root of the largest eigenvalue of that Hermitian map.
    """
    tol = settings.bound_tol if tol is None else tol
    graph = interaction_graph(spec)
    schedule = greedy_color(graph) if schedule is None else schedule
    basis = ground_space(spec, seed=seed)
    epsilon, g = basis.gap, graph.g

    P = build_P(spec, schedule)
    G = basis.projector()
    pp_min, pp_max = extremal_eigs(P.H @ P - G, spec.dim, seed=seed)
    dl_norm = _difference_norm(P - G, spec.dim, pp_max)
    bound = dl_bound(epsilon, g)
    delta = gap_delta(epsilon, g)

    passed = dl_norm <= bound + tol
    pp_passed = pp_min >= -tol and pp_max <= 1.0 - delta + tol
    if not (passed and pp_passed):
        logger.warning("detectability bound violated: ||P-G|| = %.12g, bound %.12g", dl_norm, bound)
    return DLReport(
        epsilon=epsilon, g=g, c=schedule.c, dl_norm=dl_norm, bound=bound, margin=bound - dl_norm,
        passed=passed, delta=delta, pp_min=pp_min, pp_max=pp_max, pp_upper=1.0 - delta, pp_passed=pp_passed,
    )


def _remark_row(point: tuple[float, int], tol: float, reverse: bool, seed: int | None) -> RemarkRow:
    q, n = point
    spec = xxz_spec(q, n)
    schedule = greedy_color(interaction_graph(spec))
    report = dl_check(spec, schedule, seed=seed)
    residual = abs(1.0 - report.dl_norm - report.epsilon)
    reversed_norm = reversed_residual = None
    if reverse:
        flipped = dl_check(spec, schedule.reversed(), seed=seed)
        reversed_norm = flipped.dl_norm
        reversed_residual = abs(1.0 - flipped.dl_norm - flipped.epsilon)

    passed = residual <= tol and (reversed_residual is None or reversed_residual <= tol)
    if not passed:
        logger.warning("q=%g n=%d: |1 - ||P-G|| - eps| = %.3e exceeds %.1e", q, n, residual, tol)
    return RemarkRow(
        q=q, n=n, epsilon=report.epsilon, dl_norm=report.dl_norm, residual=residual, bound=report.bound,
        passed=passed, reversed_dl_norm=reversed_norm, reversed_residual=reversed_residual,
    )


def remark_scan(q_grid: Sequence[float], n_grid: Sequence[int], tol: float | None = None,
                reverse: bool = False, threads: int | None = None, seed: int | None = None) -> list[RemarkRow]:
    """
    Compare 1 - ||P - G|| with eps on the XXZ chain for every (q, n), using the
    two-layer even/odd ordering, optionally repeated with the layers reversed.
    Rows come back in grid order (q outer, n inner).
    """
    tol = settings.remark_tol if tol is None else tol
    points = [(q, n) for q in q_grid for n in n_grid]
    return ordered_map(lambda point: _remark_row(point, tol, reverse, seed), points, threads)
