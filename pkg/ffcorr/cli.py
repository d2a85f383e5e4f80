"""
Command-line driver.

    python -m ffcorr <command> [--model xxz --q Q --n N | --file MODEL.json] [options]

Exit codes: 0 all checks pass, 1 validation error, 2 I/O or parse error,
3 bound violation, 4 solver did not converge.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Callable

import yaml
from pydantic import ValidationError

from ffcorr import __version__
from ffcorr.commands.agsp import cmd_agsp, cmd_cone
from ffcorr.commands.common import CommandOutcome
from ffcorr.commands.correlation import cmd_corr, cmd_entropy, cmd_sweep
from ffcorr.commands.detectability import cmd_dl, cmd_remark
from ffcorr.commands.validate import cmd_validate
from ffcorr.config import settings
from ffcorr.errors import EXIT_IO, EXIT_VALIDATION, FFCorrError
from ffcorr.models import Command, RunConfig
from ffcorr.services.presets import get_preset
from ffcorr.services.results_writer import write_table

logger = logging.getLogger("ffcorr")

COMMANDS: dict[Command, Callable[[RunConfig], CommandOutcome]] = {
    Command.VALIDATE: cmd_validate,
    Command.DL: cmd_dl,
    Command.REMARK: cmd_remark,
    Command.AGSP: cmd_agsp,
    Command.CONE: cmd_cone,
    Command.CORR: cmd_corr,
    Command.SWEEP: cmd_sweep,
    Command.ENTROPY: cmd_entropy,
}

HELP = {
    Command.VALIDATE: "check model assumptions and frustration-freeness",
    Command.DL: "detectability-lemma bound on ||P - G||",
    Command.REMARK: "scan 1 - ||P - G|| against the gap on the XXZ chain",
    Command.AGSP: "||Q_m(P^dag P) - G|| against 2 exp(-2 m sqrt(delta))",
    Command.CONE: "causal-cone identity for sigma^z observables",
    Command.CORR: "XXZ correlators against their closed form and the decay bound",
    Command.SWEEP: "correlation-length scaling with the gap",
    Command.ENTROPY: "entanglement entropy of the one-magnon ground state",
}


# ── Grid syntax ──────────────────────────────────────────────────────────────

def parse_grid(text: str, kind: type = float) -> tuple:
    """'start:stop:step' (stop included within half a step), 'a,b,c' or a single value."""
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0:
                raise ValueError("step must be positive")
            values = []
            k = 0
            while start + k * step <= stop + 0.5 * step:
                values.append(round(start + k * step, 12))
                k += 1
        else:
            values = [float(part) for part in text.split(",") if part.strip()]
        if not values:
            raise ValueError("empty grid")
        if kind is int:
            if any(v != int(v) for v in values):
                raise ValueError("grid values must be integers")
            return tuple(int(v) for v in values)
        return tuple(values)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid grid '{text}': {exc}") from None


def _float_grid(text: str) -> tuple:
    return parse_grid(text, float)


def _int_grid(text: str) -> tuple:
    return parse_grid(text, int)


# ── Parser ───────────────────────────────────────────────────────────────────

def _add_common(parser: argparse.ArgumentParser) -> None:
    # defaults stay None so presets can fill in what the command line leaves out
    model = parser.add_argument_group("model")
    model.add_argument("--model", help="builtin model (xxz)")
    model.add_argument("--file", help="model file (JSON)")
    model.add_argument("--q", type=float, help="XXZ anisotropy parameter in (0, 1]")
    model.add_argument("--n", type=int, help="number of sites")

    grids = parser.add_argument_group("grids")
    grids.add_argument("--q-grid", dest="q_grid", type=_float_grid, help="start:stop:step or a,b,c")
    grids.add_argument("--n-grid", dest="n_grid", type=_int_grid, help="start:stop:step or a,b,c")
    grids.add_argument("--m-grid", dest="m_grid", type=_int_grid, help="polynomial degrees")
    grids.add_argument("--m-max", dest="m_max", type=int, help="largest degree / causal-cone power")

    observables = parser.add_argument_group("observables")
    observables.add_argument("--a", type=int, help="site of observable A")
    observables.add_argument("--b", type=int, help="site of observable B (default: last site)")
    observables.add_argument("--cut", type=int, help="entropy cut (default: every cut)")

    run = parser.add_argument_group("run")
    run.add_argument("--preset", help=f"named defaults from {settings.presets_path}")
    run.add_argument("--tol", type=float, help="check tolerance (default: the setting for each check)")
    run.add_argument("--seed", type=int, help="random seed for iterative solvers")
    run.add_argument("--threads", type=int, help="worker threads for grid scans")
    run.add_argument("--out", help="output path (CSV to stdout when omitted)")
    run.add_argument("--format", dest="fmt", choices=["csv", "xlsx"], help="output format")
    run.add_argument("--force", action="store_true", default=None, help="allow runs beyond desk scale")
    run.add_argument("--reverse", action="store_true", default=None, help="remark: also scan reversed layers")
    run.add_argument("--log-level", dest="log_level", type=str.upper,
                     choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="stderr log level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ffcorr",
        description="Numerical checks of correlation decay in frustration-free Hamiltonians.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in Command:
        _add_common(subparsers.add_parser(command.value, help=HELP[command]))
    return parser


_NOT_CONFIG = {"log_level"}
_GRID_KINDS = {"q_grid": float, "n_grid": int, "m_grid": int}


def build_config(args: argparse.Namespace) -> RunConfig:
    """Preset values first, then every flag given on the command line."""
    values: dict = {"seed": settings.default_seed, "threads": settings.default_threads}
    if args.preset:
        values.update(get_preset(args.preset))
        values["preset"] = args.preset
    for key, value in vars(args).items():
        if value is not None and key not in _NOT_CONFIG and key != "preset":
            values[key] = value
    for key, kind in _GRID_KINDS.items():
        if isinstance(values.get(key), str):
            values[key] = parse_grid(values[key], kind)
    return RunConfig(**values)


def configure_logging(level: str | None) -> None:
    logging.basicConfig(
        level=(level or settings.log_level).upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    try:
        config = build_config(args)
        logger.info("running %s (config %s)", config.command.value, config.fingerprint())
        outcome = COMMANDS[config.command](config)
        written = write_table(outcome.table, config)
        if written:
            logger.info("wrote %s", written)
        return outcome.exit_code
    except FFCorrError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except ValidationError as exc:
        logger.error("invalid configuration: %s", exc)
        return EXIT_VALIDATION
    except (OSError, yaml.YAMLError, argparse.ArgumentTypeError) as exc:
        logger.error("I/O error: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
