"""Parameter sweeps: run a grid of values for one parameter and summarize."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .config import ConfigError
from .core import INT_FIELDS, PARAM_FIELDS, Parameters, validate_params
from .engine import run
from .output import _fmt, _write_lines, emit_all


def parse_grid(spec: str) -> tuple[str, list]:
    """Parse "key=start:stop:steps" into (key, values): a linear grid with
    both endpoints, integer-valued for integer parameters.
    """
    if "=" not in spec:
        raise ConfigError(f"grid must look like key=start:stop:steps, got {spec!r}")
    key, _, rest = spec.partition("=")
    key = key.strip()
    if key not in PARAM_FIELDS:
        raise ConfigError(f"unknown sweep key {key!r}")
    parts = rest.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid range must be start:stop:steps, got {rest!r}")
    try:
        start, stop = float(parts[0]), float(parts[1])
        steps = int(parts[2])
    except ValueError:
        raise ConfigError(f"malformed grid range {rest!r}") from None
    if steps < 2:
        raise ConfigError(f"grid needs at least 2 steps (got {steps})")
    grid = np.linspace(start, stop, steps)
    if key in INT_FIELDS:
        values = [int(round(v)) for v in grid]
        if len(set(values)) != len(values):
            raise ConfigError(
                f"integer grid for {key!r} produces duplicate values: {values}"
            )
    else:
        values = [float(v) for v in grid]
    return key, values


def run_sweep(
    base: Parameters, grid_spec: str, outdir: str | Path, figures: bool = True
) -> Path:
    """Run the grid against a base configuration; every run reuses the base
    seed and writes its outputs under outdir/key=value/. All parameter
    sets are validated before the first run starts.
    """
    key, values = parse_grid(grid_spec)
    outdir = Path(outdir)
    runs = [base.with_overrides(**{key: v}) for v in values]
    for params in runs:
        validate_params(params)

    rows = [
        "key,value,mean_avalanche,total_bankrupt_d,total_bankrupt_u,"
        "total_bankrupt_b,mean_avg_Y_d"
    ]
    for value, params in zip(values, runs):
        label = f"{key}={_fmt(value)}"
        result = run(params)
        emit_all(result, outdir / label, figures=figures)
        records = result.records
        n_periods = len(records)
        rows.append(
            ",".join(
                [
                    key,
                    _fmt(value),
                    _fmt(sum(r.avalanche for r in records) / n_periods),
                    str(sum(r.bankrupt_d for r in records)),
                    str(sum(r.bankrupt_u for r in records)),
                    str(sum(r.bankrupt_b for r in records)),
                    _fmt(sum(r.avg_output_d for r in records) / n_periods),
                ]
            )
        )
    summary = outdir / "sweep_summary.csv"
    _write_lines(summary, rows)
    return summary
