"""
Model file reader and writer.

    {"n": 4, "local_dim": 2, "range": 2, "positions": [1, 2, 3, 4],
     "terms": [{"sites": [1, 2], "matrix": [[re, im], ...], "projector": true}, ...]}

Matrices are row-major lists of [re, im] pairs; "positions" and "projector"
are optional.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ffcorr.errors import ModelFormatError
from ffcorr.models import HamiltonianSpec, TermSpec


class _TermRecord(BaseModel):
    sites: list[int]
    matrix: list
    projector: bool = True


class _ModelRecord(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    n: int
    local_dim: int = 2
    interaction_range: int = Field(default=2, alias="range")
    positions: list[int] = Field(default_factory=list)
    terms: list[_TermRecord] = Field(default_factory=list)


def _format_error(exc: ValidationError) -> ModelFormatError:
    error = exc.errors()[0]
    loc = error.get("loc", ())
    term_index = loc[1] if len(loc) > 1 and loc[0] == "terms" and isinstance(loc[1], int) else None
    field = ".".join(str(part) for part in (loc[2:] if term_index is not None else loc))
    message = error.get("msg", "invalid model file")
    if error.get("type") == "missing":
        message = f"missing key '{field}'"
    elif field:
        message = f"{field}: {message}"
    return ModelFormatError(message, term_index=term_index)


def _decode_matrix(raw: list, size: int, index: int) -> np.ndarray:
    try:
        pairs = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise ModelFormatError("matrix entries must be numeric [re, im] pairs", term_index=index)
    if pairs.ndim < 2 or pairs.shape[-1] != 2:
        raise ModelFormatError("matrix entries must be [re, im] pairs", term_index=index)
    values = pairs[..., 0] + 1j * pairs[..., 1]
    if values.size != size * size:
        raise ModelFormatError(f"matrix has {values.size} entries, expected {size}x{size}", term_index=index)
    return values.reshape(size, size)


def parse_model(text: str) -> HamiltonianSpec:
    try:
        record = _ModelRecord.model_validate_json(text)
    except ValidationError as exc:
        raise _format_error(exc) from exc

    terms = []
    for index, term in enumerate(record.terms):
        if not term.sites:
            raise ModelFormatError("empty support", term_index=index)
        size = record.local_dim ** len(term.sites)
        matrix = _decode_matrix(term.matrix, size, index)
        terms.append(TermSpec(sites=tuple(term.sites), matrix=matrix, projector=term.projector))

    return HamiltonianSpec(
        n=record.n, s=record.local_dim, r=record.interaction_range,
        positions=tuple(record.positions), terms=tuple(terms),
    )


def load_model_file(path: str | Path) -> HamiltonianSpec:
    """Read a model file. Structural problems raise ModelFormatError naming the term."""
    return parse_model(Path(path).read_text(encoding="utf-8"))


def dump_model_file(spec: HamiltonianSpec, path: str | Path) -> Path:
    payload = {
        "n": spec.n,
        "local_dim": spec.s,
        "range": spec.r,
        "positions": list(spec.positions),
        "terms": [
            {
                "sites": list(term.sites),
                "matrix": [[float(z.real), float(z.imag)] for z in term.matrix.ravel()],
                "projector": term.projector,
            }
            for term in spec.terms
        ],
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path
