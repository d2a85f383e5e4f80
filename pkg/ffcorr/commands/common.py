"""
Shared plumbing for command handlers: model resolution, the desk-scale
guard, and the outcome every handler returns.
"""
from __future__ import annotations

from dataclasses import dataclass

from ffcorr.config import settings
from ffcorr.errors import EXIT_BOUND_VIOLATION, EXIT_OK, DeskScaleError, PreconditionError
from ffcorr.models import HamiltonianSpec, RunConfig
from ffcorr.services.model_file import load_model_file
from ffcorr.services.results_writer import ResultTable
from ffcorr.services.xxz import xxz_spec


@dataclass
class CommandOutcome:
    table: ResultTable
    exit_code: int = EXIT_OK

    @classmethod
    def checked(cls, table: ResultTable, passed: bool) -> "CommandOutcome":
        return cls(table=table, exit_code=EXIT_OK if passed else EXIT_BOUND_VIOLATION)


def guard_desk_scale(n: int, s: int, force: bool) -> None:
    if force:
        return
    limit = 2 ** settings.max_sites
    if s ** n > limit:
        raise DeskScaleError(
            f"state space {s}^{n} exceeds the desk-scale limit of {limit} amplitudes; "
            f"pass --force to run anyway ({16 * s ** n / 2 ** 20:.1f} MiB per state vector)"
        )


def xxz_points(config: RunConfig) -> list[tuple[float, int]]:
    if config.file is not None or config.model != "xxz":
        raise PreconditionError(f"command '{config.command.value}' needs the builtin xxz model")
    points = [(q, n) for q in config.effective_q_grid() for n in config.effective_n_grid()]
    for _, n in points:
        guard_desk_scale(n, 2, config.force)
    return points


def resolve_specs(config: RunConfig) -> list[tuple[float | None, HamiltonianSpec]]:
    """The model file, or the xxz chain at every (q, n) of the grids."""
    if config.file is not None:
        spec = load_model_file(config.file)
        guard_desk_scale(spec.n, spec.s, config.force)
        return [(None, spec)]
    if config.model != "xxz":
        raise PreconditionError(f"unknown model '{config.model}'; use 'xxz' or --file")
    return [(q, xxz_spec(q, n)) for q, n in xxz_points(config)]
