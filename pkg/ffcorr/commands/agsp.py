"""agsp and cone: the Chebyshev AGSP error and the causal-cone identity."""
from __future__ import annotations

from ffcorr.commands.common import CommandOutcome, resolve_specs
from ffcorr.models import RunConfig
from ffcorr.services.agsp import agsp_sweep, causal_cone_check
from ffcorr.services.hamiltonian import pauli_z
from ffcorr.services.results_writer import ResultTable
from ffcorr.workers.pool import ordered_map


def _m_grid(config: RunConfig) -> list[int]:
    return list(config.m_grid) if config.m_grid else list(range(1, config.m_max + 1))


def cmd_agsp(config: RunConfig) -> CommandOutcome:
    table = ResultTable(columns=["q", "n", "m", "delta", "bound", "measured_norm", "margin", "pass"])
    specs = resolve_specs(config)
    m_grid = _m_grid(config)
    sweeps = ordered_map(lambda item: agsp_sweep(item[1], None, m_grid, tol=config.tol, seed=config.seed),
                         specs, config.threads)
    passed = True
    for (q, spec), rows in zip(specs, sweeps):
        for row in rows:
            table.rows.append([q, spec.n, row.m, row.delta, row.bound, row.measured_norm, row.margin, row.passed])
            passed = passed and row.passed
    return CommandOutcome.checked(table, passed)


def cmd_cone(config: RunConfig) -> CommandOutcome:
    table = ResultTable(columns=["q", "n", "m", "state_index", "residual", "guaranteed", "holds"])
    passed = True
    for q, spec in resolve_specs(config):
        b = spec.n if config.b is None else config.b
        report = causal_cone_check(spec, None, pauli_z(config.a), pauli_z(b), config.m_max,
                                   tol=config.tol, seed=config.seed)
        for row in report.rows:
            table.rows.append([q, spec.n, row.m, row.state_index, row.residual, row.guaranteed, row.holds])
        table.trailer.append(
            f"q={'' if q is None else q} n={spec.n} a={config.a} b={b} distance={report.distance} "
            f"m_admissible={report.m_admissible} first_failure_m={report.first_failure_m}"
        )
        passed = passed and report.passed
    return CommandOutcome.checked(table, passed)
