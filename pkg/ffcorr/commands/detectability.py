"""dl and remark: the detectability-lemma bound and the 1 - ||P - G|| = eps scan."""
from __future__ import annotations

from ffcorr.commands.common import CommandOutcome, resolve_specs, xxz_points
from ffcorr.models import RunConfig
from ffcorr.services.detectability import dl_check, remark_scan
from ffcorr.services.results_writer import ResultTable
from ffcorr.workers.pool import ordered_map


def cmd_dl(config: RunConfig) -> CommandOutcome:
    table = ResultTable(columns=[
        "q", "n", "epsilon", "g", "c", "dl_norm", "bound", "margin", "pass",
        "pp_min", "pp_max", "pp_upper", "pp_pass",
    ])
    specs = resolve_specs(config)
    reports = ordered_map(lambda item: dl_check(item[1], tol=config.tol, seed=config.seed), specs, config.threads)
    for (q, spec), r in zip(specs, reports):
        table.rows.append([
            q, spec.n, r.epsilon, r.g, r.c, r.dl_norm, r.bound, r.margin, r.passed,
            r.pp_min, r.pp_max, r.pp_upper, r.pp_passed,
        ])
    return CommandOutcome.checked(table, all(r.passed and r.pp_passed for r in reports))


def cmd_remark(config: RunConfig) -> CommandOutcome:
    xxz_points(config)
    columns = ["q", "n", "epsilon", "dl_norm", "residual", "bound", "pass"]
    if config.reverse:
        columns += ["reversed_dl_norm", "reversed_residual"]
    table = ResultTable(columns=columns)

    rows = remark_scan(
        config.effective_q_grid(), config.effective_n_grid(), tol=config.tol,
        reverse=config.reverse, threads=config.threads, seed=config.seed,
    )
    for row in rows:
        values = [row.q, row.n, row.epsilon, row.dl_norm, row.residual, row.bound, row.passed]
        if config.reverse:
            values += [row.reversed_dl_norm, row.reversed_residual]
        table.rows.append(values)
    return CommandOutcome.checked(table, all(row.passed for row in rows))
