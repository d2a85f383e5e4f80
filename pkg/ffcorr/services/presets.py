"""
Named run presets.
Reads CLI defaults (grids, tolerances, sites) from YAML; explicit flags override them.
"""
from __future__ import annotations

from pathlib import Path

import yaml

from ffcorr.config import settings
from ffcorr.errors import PreconditionError


_presets_cache: dict[str, dict] | None = None


def load_presets(yaml_path: str | None = None) -> dict[str, dict]:
    """Load all presets from YAML. Caches after first load of the default file."""
    global _presets_cache
    if yaml_path is None and _presets_cache is not None:
        return _presets_cache

    path = Path(yaml_path or settings.presets_path)
    if not path.exists():
        raise FileNotFoundError(f"Presets file not found at {path}")

    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}

    presets = {str(name): dict(values or {}) for name, values in data.get("presets", {}).items()}
    if yaml_path is None:
        _presets_cache = presets
    return presets


def reload_presets() -> dict[str, dict]:
    """Force reload the default presets file (e.g., after editing YAML)."""
    global _presets_cache
    _presets_cache = None
    return load_presets()


def get_preset(name: str, yaml_path: str | None = None) -> dict:
    presets = load_presets(yaml_path)
    if name not in presets:
        raise PreconditionError(f"unknown preset '{name}'; available: {', '.join(sorted(presets))}")
    return dict(presets[name])
