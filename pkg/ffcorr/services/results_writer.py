"""
Result tables: CSV with a '#' comment header, or an XLSX workbook.

Row bodies depend only on the run configuration, so two identical runs
produce byte-identical CSV bodies; the timestamp lives in a comment line.
"""
from __future__ import annotations

import csv
import io
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from openpyxl import Workbook

from ffcorr import __version__
from ffcorr.models import OutputFormat, RunConfig


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    trailer: list[str] = field(default_factory=list)  # comment lines after the body


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".15g")
    if value is None:
        return ""
    return str(value)


def header_lines(config: RunConfig) -> list[str]:
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return [
        f"# ffcorr {__version__} command={config.command.value} config={config.fingerprint()}",
        f"# generated {stamp}",
    ]


def render_csv(table: ResultTable, config: RunConfig) -> str:
    buffer = io.StringIO()
    for line in header_lines(config):
        buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_cell(value) for value in row])
    for line in table.trailer:
        buffer.write(f"# {line}\n")
    return buffer.getvalue()


def write_xlsx(table: ResultTable, config: RunConfig, output_path: str) -> str:
    """One sheet with the result columns; the header comments go to a second sheet."""
    os.makedirs(os.path.dirname(os.path.abspath(output_path)), exist_ok=True)
    wb = Workbook()
    ws = wb.active
    ws.title = config.command.value

    for col, name in enumerate(table.columns, start=1):
        ws.cell(row=1, column=col, value=name)
    for row_idx, row in enumerate(table.rows, start=2):
        for col, value in enumerate(row, start=1):
            ws.cell(row=row_idx, column=col, value=value)

    meta = wb.create_sheet("run")
    for row_idx, line in enumerate(header_lines(config) + [f"# {t}" for t in table.trailer], start=1):
        meta.cell(row=row_idx, column=1, value=line.lstrip("# "))

    wb.save(output_path)
    wb.close()
    return output_path


def write_table(table: ResultTable, config: RunConfig) -> str | None:
    """Write to config.out (stdout for CSV when unset). Returns the path written, if any."""
    if config.fmt == OutputFormat.XLSX:
        output_path = config.out or f"{config.command.value}.xlsx"
        return write_xlsx(table, config, output_path)

    text = render_csv(table, config)
    if config.out is None:
        sys.stdout.write(text)
        return None
    path = Path(config.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return str(path)
