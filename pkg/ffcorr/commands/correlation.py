"""corr, sweep and entropy: XXZ correlators, the xi scaling sweep and the entropy probe."""
from __future__ import annotations

import math

from ffcorr.commands.common import CommandOutcome, xxz_points
from ffcorr.config import settings
from ffcorr.models import RunConfig
from ffcorr.services.correlation import (
    half_chain_entropy,
    theorem_bound_check,
    xi_scaling_sweep,
    xxz_series,
)
from ffcorr.services.results_writer import ResultTable
from ffcorr.services.xxz import xxz_gap_closed_form, xxz_psi1
from ffcorr.workers.pool import ordered_map

# c, r, g of the XXZ chain
XXZ_LAYERS, XXZ_RANGE, XXZ_DEGREE = 2, 2, 2


def _corr_rows(q: float, n: int, tol: float) -> tuple[list[list], bool]:
    series = xxz_series(q, n)
    epsilon = xxz_gap_closed_form(q, n)
    theorem = theorem_bound_check(series, XXZ_LAYERS, XXZ_RANGE, XXZ_DEGREE, epsilon)
    rows, passed = [], True
    for d, value, closed_form, bound in zip(series.distances, series.values, series.reference, theorem):
        abs_err = abs(value - closed_form)
        ok = abs_err <= tol and bound.passed
        rows.append([q, n, d, value, closed_form, abs_err, bound.bound, ok])
        passed = passed and ok
    return rows, passed


def cmd_corr(config: RunConfig) -> CommandOutcome:
    table = ResultTable(columns=["q", "n", "d", "value", "closed_form", "abs_err", "theorem_bound", "pass"])
    tol = settings.corr_tol if config.tol is None else config.tol
    results = ordered_map(lambda point: _corr_rows(point[0], point[1], tol), xxz_points(config), config.threads)
    for rows, _ in results:
        table.rows.extend(rows)
    return CommandOutcome.checked(table, all(passed for _, passed in results))


def cmd_sweep(config: RunConfig) -> CommandOutcome:
    table = ResultTable(columns=["q", "epsilon", "xi_fit", "xi_lower", "xi_upper", "pass"])
    result = xi_scaling_sweep(config.effective_q_grid(), tol=config.tol, threads=config.threads)
    for row in result.rows:
        table.rows.append([row.q, row.epsilon, row.xi_fit, row.xi_lower, row.xi_upper, row.passed])
    table.trailer.append(f"slope={result.slope:.15g} slope_pass={'true' if result.slope_passed else 'false'}")
    return CommandOutcome.checked(table, result.slope_passed and all(row.passed for row in result.rows))


def _entropy_rows(q: float, n: int, cut: int | None) -> list[list]:
    psi = xxz_psi1(q, n)
    epsilon = xxz_gap_closed_form(q, n)
    cuts = [cut] if cut is not None else list(range(1, n))
    return [[q, n, k, epsilon, 1.0 / math.sqrt(epsilon), half_chain_entropy(psi, k)] for k in cuts]


def cmd_entropy(config: RunConfig) -> CommandOutcome:
    table = ResultTable(columns=["q", "n", "cut", "epsilon", "inv_sqrt_epsilon", "entropy"])
    results = ordered_map(lambda point: _entropy_rows(point[0], point[1], config.cut), xxz_points(config),
                          config.threads)
    for rows in results:
        table.rows.extend(rows)
    return CommandOutcome.checked(table, True)
