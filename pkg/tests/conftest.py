from pathlib import Path

import numpy as np
import pytest

from ffcorr.config import settings
from ffcorr.models import HamiltonianSpec, TermSpec
from ffcorr.services import presets
from ffcorr.services.xxz import xxz_spec

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

# Pin (1, 2) to |01> and (2, 3) to |01>: site 2 cannot be both 1 and 0.
PIN_01 = np.diag([1.0, 0.0, 1.0, 1.0])


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def xxz4() -> HamiltonianSpec:
    return xxz_spec(0.5, 4)


@pytest.fixture
def frustrated() -> HamiltonianSpec:
    return HamiltonianSpec(n=3, terms=(
        TermSpec(sites=(1, 2), matrix=PIN_01),
        TermSpec(sites=(2, 3), matrix=PIN_01),
    ))


@pytest.fixture
def commuting() -> HamiltonianSpec:
    """Projectors on disjoint pairs: every term commutes with every other."""
    phi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    projector = np.outer(phi, phi)
    return HamiltonianSpec(n=4, terms=(
        TermSpec(sites=(1, 2), matrix=projector),
        TermSpec(sites=(3, 4), matrix=projector),
    ))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


@pytest.fixture
def lanczos_only(monkeypatch):
    """Force the iterative eigensolver path for every dimension above 8."""
    monkeypatch.setattr(settings, "dense_threshold", 8)


@pytest.fixture
def repo_presets(monkeypatch):
    monkeypatch.setattr(settings, "presets_path", str(DATA / "presets.yaml"))
    monkeypatch.setattr(presets, "_presets_cache", None)
