"""Built-in design presets shipped as package data.

These cover the reference figure settings (three design priors each for
the continuous, binary single-arm, and time-to-event endpoints) and the
CULPRIT-SHOCK two-arm re-design, so every standard configuration can be
run without hand-writing a config file.
"""

from __future__ import annotations

import json
from importlib import resources

from .design import DesignSpec, spec_from_dict
from .errors import DomainError

__all__ = ["list_presets", "preset_document", "load_preset"]


def _preset_dir():
    return resources.files(__package__) / "presets"


def list_presets() -> list[str]:
    names = [path.name[:-5] for path in _preset_dir().iterdir()
             if path.name.endswith(".json")]
    return sorted(names)


def preset_document(name: str) -> dict:
    """The raw DesignSpec JSON document for a preset name."""
    path = _preset_dir() / f"{name}.json"
    if name not in list_presets():
        raise DomainError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return json.loads(path.read_text())


def load_preset(name: str) -> DesignSpec:
    return spec_from_dict(preset_document(name))
