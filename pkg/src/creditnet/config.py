"""Flat key=value configuration files.

Every model constant has a default, so an empty file (or no file) yields
the reference experiment; unknown keys and malformed numbers are rejected
with their line number.
"""

from __future__ import annotations

from pathlib import Path

from .core import INT_FIELDS, PARAM_FIELDS, Parameters, validate_params


class ConfigError(ValueError):
    """A configuration file could not be parsed or validated."""


def parse_config(path: str | Path) -> Parameters:
    """Read a flat key=value file ('#' starts a comment) into a validated
    parameter set; missing keys take the defaults.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    overrides: dict[str, float | int] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in PARAM_FIELDS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            overrides[key] = int(value) if key in INT_FIELDS else float(value)
        except ValueError:
            raise ConfigError(
                f"{path}:{lineno}: malformed number for {key!r}: {value!r}"
            ) from None
    params = Parameters(**overrides)
    try:
        return validate_params(params)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def format_config(p: Parameters) -> str:
    """Render a parameter set as key=value lines that parse back identically."""
    lines = []
    for name in PARAM_FIELDS:
        value = getattr(p, name)
        lines.append(f"{name}={value!r}" if isinstance(value, float) else f"{name}={value}")
    return "\n".join(lines) + "\n"
