"""
Ground-state correlators with a degenerate ground space,
|<psi|AB|psi> - <psi|AGB|psi>|, their decay length, and the entropy probe.
"""
from __future__ import annotations

import logging
import math
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
from scipy.special import entr
from scipy.stats import linregress

from ffcorr.config import settings
from ffcorr.errors import DomainError, InsufficientDataError, NoDecayError, PreconditionError
from ffcorr.models import (
    CorrelationSeries,
    GroundSpaceBasis,
    HamiltonianSpec,
    LocalObservable,
    SweepResult,
    SweepRow,
    TheoremBoundRow,
    XiFit,
)
from ffcorr.services.hamiltonian import number_operator
from ffcorr.services.linalg import apply_hamiltonian, apply_local, site_count
from ffcorr.services.spectral import default_zero_tol, ground_space
from ffcorr.services.xxz import (
    INF,
    xxz_correlator_closed_form,
    xxz_gap_closed_form,
    xxz_psi1,
    xxz_spec,
    xxz_xi_lower_bound,
)
from ffcorr.workers.pool import ordered_map

logger = logging.getLogger(__name__)

THEOREM_PREFACTOR = 2.0 * math.e ** 2
SLOPE_WINDOW = (-0.55, -0.45)


def correlator_deg(spec: HamiltonianSpec, psi: np.ndarray, A: LocalObservable, B: LocalObservable,
                   basis: GroundSpaceBasis | None = None, tol: float | None = None) -> float:
    """|<psi|AB|psi> - <psi|AGB|psi>| with G applied through the ground basis."""
    tol = default_zero_tol(spec) if tol is None else tol
    psi = np.asarray(psi, dtype=complex)
    energy_residual = float(np.linalg.norm(apply_hamiltonian(spec, psi)))
    if energy_residual > tol:
        raise PreconditionError(f"psi is not a ground state: ||H psi|| = {energy_residual:.3e}")
    if set(A.sites) & set(B.sites):
        raise PreconditionError(f"observables overlap: {A.sites} and {B.sites}")
    basis = ground_space(spec) if basis is None else basis

    left = apply_local(A.matrix.conj().T, A.sites, spec.n, spec.s, psi)
    right = apply_local(B.matrix, B.sites, spec.n, spec.s, psi)
    V = basis.vectors
    direct = np.vdot(left, right)
    through_ground = np.vdot(V.conj().T @ left, V.conj().T @ right)
    return float(abs(direct - through_ground))


def correlation_series(spec: HamiltonianSpec, psi: np.ndarray, A_family: Callable[[int], LocalObservable],
                       B_family: Callable[[int], LocalObservable], d_list: Sequence[int]) -> CorrelationSeries:
    """correlator_deg(A_family(d), B_family(d)) for each distance d."""
    basis = ground_space(spec)
    values = []
    for d in d_list:
        values.append(correlator_deg(spec, psi, A_family(d), B_family(d), basis=basis))
    first = d_list[0] if d_list else 1
    return CorrelationSeries(
        a_label=A_family(first).label, b_label=B_family(first).label,
        distances=tuple(d_list), values=tuple(values),
    )


def xxz_series(q: float, n: int, d_list: Sequence[int] | None = None) -> CorrelationSeries:
    """Number-operator correlators on psi_1 between site 1 and site 1 + d, with closed forms attached."""
    d_list = list(range(1, n)) if d_list is None else list(d_list)
    spec = xxz_spec(q, n)
    series = correlation_series(
        spec, xxz_psi1(q, n), lambda d: number_operator(1), lambda d: number_operator(1 + d), d_list,
    )
    reference = tuple(xxz_correlator_closed_form(q, n, d) for d in d_list)
    return series.model_copy(update={"reference": reference, "b_label": "n(1+d)"})


def analytic_xxz_series(q: float, d_list: Sequence[int]) -> CorrelationSeries:
    """Infinite-chain closed-form series (1 - q^2)^2 q^{2d}."""
    values = tuple(xxz_correlator_closed_form(q, INF, d) for d in d_list)
    return CorrelationSeries(a_label="n1", b_label="n(1+d)", distances=tuple(d_list), values=values,
                             reference=values)


def fit_xi(series: CorrelationSeries, floor: float | None = None) -> XiFit:
    """Least squares of ln(value) against d; xi = -1/slope."""
    floor = settings.fit_floor if floor is None else floor
    window = [(d, v) for d, v in zip(series.distances, series.values) if v > floor]
    if len(window) < 3:
        raise InsufficientDataError(f"need at least 3 values above {floor:g}, got {len(window)}")
    distances = np.array([d for d, _ in window], dtype=float)
    logs = np.log([v for _, v in window])
    fit = linregress(distances, logs)
    if fit.slope >= 0:
        raise NoDecayError(f"correlator does not decay: slope {fit.slope:.6g}")
    return XiFit(
        xi=-1.0 / fit.slope,
        amplitude=math.exp(fit.intercept),
        r_squared=fit.rvalue ** 2,
        window=tuple(d for d, _ in window),
    )


def xi_upper_formula(c: int, r: int, g: int, epsilon: float) -> float:
    """((2c - 1)(r - 1)/2) sqrt((g^2 + eps)/eps), the decay length guaranteed with C = 2e^2."""
    if epsilon <= 0:
        raise DomainError(f"gap must be positive, got {epsilon}")
    return 0.5 * (2 * c - 1) * (r - 1) * math.sqrt((g ** 2 + epsilon) / epsilon)


def theorem_bound_check(series: CorrelationSeries, c: int, r: int, g: int, epsilon: float,
                        a_norm: float = 1.0, b_norm: float = 1.0,
                        tol: float | None = None) -> list[TheoremBoundRow]:
    """value <= 2e^2 ||A|| ||B|| exp(-d/xi) at each point, xi from xi_upper_formula."""
    tol = settings.bound_tol if tol is None else tol
    xi = xi_upper_formula(c, r, g, epsilon)
    rows = []
    for d, value in zip(series.distances, series.values):
        bound = THEOREM_PREFACTOR * a_norm * b_norm * math.exp(-d / xi)
        rows.append(TheoremBoundRow(d=d, value=value, bound=bound, passed=value <= bound + tol))
    return rows


def _sweep_row(q: float, d_list: Sequence[int], tol: float) -> SweepRow:
    epsilon = xxz_gap_closed_form(q, INF)
    fit = fit_xi(analytic_xxz_series(q, d_list))
    lower = xxz_xi_lower_bound(q)
    upper = xi_upper_formula(2, 2, 2, epsilon)
    passed = lower - tol <= fit.xi <= upper + tol
    if not passed:
        logger.warning("q=%g: fitted xi %.6g outside [%.6g, %.6g]", q, fit.xi, lower, upper)
    return SweepRow(q=q, epsilon=epsilon, xi_fit=fit.xi, xi_lower=lower, xi_upper=upper, passed=passed)


def xi_scaling_sweep(q_grid: Sequence[float], d_list: Sequence[int] | None = None,
                     tol: float | None = None, threads: int | None = None) -> SweepResult:
    """
    Per q: infinite-chain gap, fitted xi of the analytic series and the two
    bounds around it; then the slope of ln xi against ln eps over the grid.
    The XXZ chain has c = 2, r = 2 and g = 2.
    """
    tol = settings.bound_tol if tol is None else tol
    d_list = list(range(1, 21)) if d_list is None else list(d_list)
    rows = ordered_map(lambda q: _sweep_row(q, d_list, tol), q_grid, threads)
    if len(rows) < 2:
        raise InsufficientDataError("slope needs at least two q values")
    slope = linregress(np.log([row.epsilon for row in rows]), np.log([row.xi_fit for row in rows])).slope
    slope_passed = SLOPE_WINDOW[0] <= slope <= SLOPE_WINDOW[1]
    return SweepResult(rows=rows, slope=float(slope), slope_passed=slope_passed)


# ── Entanglement ─────────────────────────────────────────────────────────────

def half_chain_entropy(psi: np.ndarray, cut: int, s: int = 2) -> float:
    """Von Neumann entropy (natural log) of sites 1..cut."""
    psi = np.asarray(psi, dtype=complex)
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-10:
        raise PreconditionError(f"state is not normalized: ||psi|| = {norm:.12g}")
    n = site_count(psi.shape[0], s)
    if not 1 <= cut < n:
        raise PreconditionError(f"cut {cut} outside 1..{n - 1}")
    singular = scipy.linalg.svdvals(psi.reshape(s ** cut, s ** (n - cut)))
    return float(np.sum(entr(singular ** 2)))


def entropy_profile(psi: np.ndarray, s: int = 2) -> list[float]:
    n = site_count(np.asarray(psi).shape[0], s)
    return [half_chain_entropy(psi, cut, s) for cut in range(1, n)]
