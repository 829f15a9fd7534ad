"""Command-line interface: single runs, parameter sweeps, and verification.

Exit codes: 0 success, 1 usage/config error, 2 accounting-audit failure,
3 acceptance-verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, parse_config
from .core import ParameterError, Parameters, validate_params
from .engine import AccountingAuditError, run
from .output import emit_all

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_AUDIT = 2
EXIT_VERIFY = 3


def _load_params(args: argparse.Namespace) -> Parameters:
    params = parse_config(args.config) if args.config else Parameters()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "periods", None) is not None:
        overrides["horizon"] = args.periods
    if getattr(args, "agents", None) is not None:
        overrides["n_agents"] = args.agents
    if overrides:
        params = params.with_overrides(**overrides)
    return validate_params(params)


def _cmd_simulate(args: argparse.Namespace) -> int:
    params = _load_params(args)
    result = run(params)
    manifest = emit_all(result, args.out, figures=not args.no_figures)
    print(f"wrote {len(manifest.files)} files to {args.out}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    from .sweep import run_sweep

    params = _load_params(args)
    summary = run_sweep(params, args.grid, args.out, figures=not args.no_figures)
    print(f"sweep summary written to {summary}")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    import json

    from .verify import run_verification

    outdir = Path(args.out)
    results = run_verification(outdir)
    for criterion in results:
        print(criterion.line())
    payload = [
        {
            "criterion": c.number,
            "name": c.name,
            "passed": c.passed,
            "detail": c.detail,
        }
        for c in results
    ]
    (outdir / "verify_report.json").write_text(
        json.dumps(payload, indent=2) + "\n", encoding="utf-8", newline="\n"
    )
    failed = [c for c in results if not c.passed]
    if failed:
        print(f"{len(failed)} criterion(s) failed")
        return EXIT_VERIFY
    print("all criteria passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="creditnet",
        description="Three-sector credit-network economy simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="run one simulation")
    simulate.add_argument("--config", help="key=value config file (defaults apply)")
    simulate.add_argument("--out", required=True, help="output directory")
    simulate.add_argument("--seed", type=int, help="override the RNG seed")
    simulate.add_argument("--periods", type=int, help="override the horizon")
    simulate.add_argument("--agents", type=int, help="override agents per sector")
    simulate.add_argument(
        "--no-figures", action="store_true", help="skip PNG figure rendering"
    )
    simulate.set_defaults(func=_cmd_simulate)

    sweep = sub.add_parser("sweep", help="run a parameter grid")
    sweep.add_argument("--config", help="base key=value config file")
    sweep.add_argument(
        "--grid", required=True, help="grid spec, e.g. alpha=0.5:1.0:6"
    )
    sweep.add_argument("--out", required=True, help="output directory")
    sweep.add_argument(
        "--no-figures", action="store_true", help="skip PNG figure rendering"
    )
    sweep.set_defaults(func=_cmd_sweep)

    verify = sub.add_parser("verify", help="run the acceptance panel")
    verify.add_argument("--out", required=True, help="directory for verification outputs")
    verify.set_defaults(func=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AccountingAuditError as exc:
        print(f"accounting audit failure: {exc}", file=sys.stderr)
        return EXIT_AUDIT


if __name__ == "__main__":
    sys.exit(main())
