"""Command line entry point.

    dqsim run CONFIG.json [--output DIR] [--points P] [--max M] [--steps 6,8,10] ...
    dqsim emit-schedule CONFIG.json [--output DIR]
    dqsim presets list
    dqsim presets dump NAME

Exit codes: 0 success, 2 invalid configuration, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import config as cfgmod
from .experiments import emit_gate_schedule, run
from .lindblad import NumericalAbort

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _load(source: str) -> dict:
    """A config path, or ``preset:NAME`` for a built-in preset."""
    if source.startswith("preset:"):
        return cfgmod.preset_dict(source.split(":", 1)[1])
    path = Path(source)
    if not path.exists():
        raise cfgmod.ConfigError(f"config file not found: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise cfgmod.ConfigError(f"{path}: invalid JSON ({exc})") from None


def _apply_overrides(data: dict, args: argparse.Namespace) -> dict:
    if args.N is not None:
        data["N"] = args.N
    if args.steps is not None:
        try:
            data["trotter_steps"] = [int(s) for s in args.steps.split(",")]
        except ValueError:
            raise cfgmod.ConfigError(f"--steps must be comma-separated integers, got {args.steps!r}") from None
    if args.fock_dim is not None:
        data["fock_dim"] = args.fock_dim
    if args.zzz_mode is not None:
        data["zzz_mode"] = args.zzz_mode
    if args.kappa is not None:
        data.setdefault("params", {})["kappa"] = args.kappa
    grid = dict(data.get("grid", {}))
    if args.points is not None:
        grid["points"] = args.points
    if args.max is not None:
        grid["max_time" if grid.get("axis") == "time" else "max"] = args.max
    if grid:
        data["grid"] = grid
    return data


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", help="config JSON path, or preset:NAME")
    p.add_argument("--output", "-o", help="output directory (overrides config and $DQSIM_OUTPUT_DIR)")
    p.add_argument("--N", type=int)
    p.add_argument("--steps", help="comma-separated Trotter step counts")
    p.add_argument("--points", type=int, help="grid points")
    p.add_argument("--max", type=float, help="grid maximum (phase, or max_time on a time axis)")
    p.add_argument("--fock-dim", type=int, dest="fock_dim")
    p.add_argument("--zzz-mode", dest="zzz_mode", choices=["direct", "collective", "two_qubit"])
    p.add_argument("--kappa", type=float, help="resonator decay, in the config's frequency unit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dqsim", description="Digital quantum simulation experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment and write CSV + summary")
    _add_config_args(p_run)
    p_emit = sub.add_parser("emit-schedule", help="write the gate schedules of a gate-level experiment")
    _add_config_args(p_emit)

    p_pre = sub.add_parser("presets", help="built-in experiment presets")
    pre_sub = p_pre.add_subparsers(dest="preset_command", required=True)
    pre_sub.add_parser("list")
    p_dump = pre_sub.add_parser("dump")
    p_dump.add_argument("name")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "presets":
            if args.preset_command == "list":
                for name in cfgmod.preset_names():
                    print(name)
            else:
                print(json.dumps(cfgmod.preset_dict(args.name), indent=2))
            return EXIT_OK

        cfg = cfgmod.from_dict(_apply_overrides(_load(args.config), args))
        if args.command == "run":
            result = run(cfg, args.output)
            for path in result.files:
                print(path)
            s = result.summary
            finals = ", ".join(f"s={k}: {v:.6f}" for k, v in s["final_fidelity"].items())
            print(f"final fidelity {finals}; monotone in s: {s['monotone_final']}")
        else:
            counts = emit_gate_schedule(cfg, args.output)
            for s, c in counts["schedules"].items():
                print(f"s={s}: {c['total_gates']} gates, ZZ/step {c['ZZ_per_step']:g}, "
                      f"ZZZ/step {c['ZZZ_per_step']:g}, X/step {c['X_per_step']:g}, "
                      f"two-qubit/step {c['two_qubit_per_step']:g}")
        return EXIT_OK
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        if args.command == "emit-schedule":
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        raise
    except NumericalAbort as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
