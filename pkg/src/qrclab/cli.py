"""Command line entry point: ``qrc-lab <subcommand> [flags]``.

Subcommands map onto the experiment kinds; flags override config-file
values, which override preset scales, which override defaults.  ``--dry-run``
prints the resolved config and a rough cost estimate without computing.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import QRCLabError
from .experiments import (
    EXPERIMENTS,
    build_config,
    config_json_dict,
    estimate_cost,
    load_config_file,
    parse_grid,
    run_experiment,
)

_SUBCOMMANDS = {
    "phase-diagram": "phase_diagram",
    "evolve": "dynamics_trace",
    "converge": "convergence_curve",  # becomes convergence_map when a grid is given
    "task": "task_sweep",
    "ipc": "ipc_sweep",
    "conserved": "conserved_trace",
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI config file; flags override its values")
    p.add_argument("--out", help="output directory (default runs/<experiment>)")
    p.add_argument("--master-seed", type=int, help="seed for all derived randomness")
    p.add_argument("--realizations", type=int, help="independent network draws")
    p.add_argument("--workers", type=int, help="worker processes (default env or 1)")
    p.add_argument("--preset", choices=("paper", "desk"), help="figure-scale realization counts")
    p.add_argument("--n-spins", type=int, help="network size (2..12)")
    p.add_argument("--j-s", type=float, help="coupling scale (energy unit)")
    p.add_argument("--dry-run", action="store_true", help="print config and cost, do not compute")


def _add_point(p: argparse.ArgumentParser) -> None:
    p.add_argument("--h", type=float, help="transverse field strength")
    p.add_argument("--w", type=float, help="onsite disorder half-width")


def _add_grids(p: argparse.ArgumentParser) -> None:
    p.add_argument("--h-grid", help="grid spec: log:lo:hi:num or comma list")
    p.add_argument("--w-grid", help="grid spec: log:lo:hi:num or comma list")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrc-lab",
        description="Quantum reservoir computing experiments on disordered spin networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phase-diagram", help="gap-ratio statistics over an (h, w) grid")
    _add_common(p)
    _add_grids(p)

    p = sub.add_parser("evolve", help="single driven trajectory of observables")
    _add_common(p)
    _add_point(p)
    p.add_argument("--steps", type=int, help="number of input injections")
    p.add_argument("--dt", type=float, help="evolution time per step")
    p.add_argument("--input", dest="input_kind", choices=("uniform", "binary"))
    p.add_argument("--init", help="initial state name")
    p.add_argument("--record-conserved", action="store_true")

    p = sub.add_parser("converge", help="distance between two driven copies")
    _add_common(p)
    _add_point(p)
    _add_grids(p)
    p.add_argument("--steps", type=int, help="number of input injections")
    p.add_argument("--dt", type=float, help="evolution time per step")
    p.add_argument("--pairs", type=int, help="state pairs per cell (alias of --realizations)")

    p = sub.add_parser("task", help="train a linear readout on a benchmark task")
    _add_common(p)
    _add_point(p)
    _add_grids(p)
    p.add_argument("--task", dest="task_kind", choices=("narma", "delay"))
    p.add_argument("--n", dest="order", type=int, help="recurrence order")
    p.add_argument("--tau", dest="delay", type=int, help="delay-task lag")
    p.add_argument("--dt", type=float)
    p.add_argument("--washout", type=int)
    p.add_argument("--train", type=int)
    p.add_argument("--test", type=int)
    p.add_argument("--ridge", type=float)

    p = sub.add_parser("ipc", help="information processing capacity decomposition")
    _add_common(p)
    _add_point(p)
    _add_grids(p)
    p.add_argument("--dt", type=float)
    p.add_argument("--length", type=int, help="trajectory length")
    p.add_argument("--d-max", dest="max_degree", type=int)
    p.add_argument("--washout", type=int)
    p.add_argument("--threshold", dest="threshold_mode", choices=("surrogate", "analytic"))
    p.add_argument("--export-targets", action="store_true", help="write the canonical target list")
    p.add_argument("--full-report", action="store_true", help="include per-target capacities in outputs")

    p = sub.add_parser("conserved", help="energy/parity traces from several initial states")
    _add_common(p)
    _add_point(p)
    p.add_argument("--steps", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--input", dest="input_kind", choices=("uniform", "binary"))
    p.add_argument("--states", help="comma list of named initial states")

    return parser


def _flag_sections(args: argparse.Namespace) -> dict[str, dict]:
    """Regroup parsed flags into config sections (None = not given)."""
    get = lambda name: getattr(args, name, None)
    sections = {
        "experiment": {
            "output_dir": get("out"),
            "master_seed": get("master_seed"),
            "realizations": get("realizations") or get("pairs"),
            "workers": get("workers"),
            "preset": get("preset"),
        },
        "model": {
            "n_spins": get("n_spins"),
            "h": get("h"),
            "w": get("w"),
            "j_s": get("j_s"),
            "h_grid": parse_grid(args.h_grid) if get("h_grid") else None,
            "w_grid": parse_grid(args.w_grid) if get("w_grid") else None,
        },
        "reservoir": {
            "dt": get("dt"),
            "steps": get("steps"),
            "pairs": get("pairs"),
            "input_kind": get("input_kind"),
            "init": get("init"),
            "record_conserved": True if get("record_conserved") else None,
            "states": tuple(s.strip() for s in args.states.split(",")) if get("states") else None,
        },
        "task": {
            "kind": get("task_kind"),
            "order": get("order"),
            "delay": get("delay"),
            "washout": get("washout") if args.command == "task" else None,
            "train": get("train"),
            "test": get("test"),
            "ridge": get("ridge"),
        },
        "ipc": {
            "max_degree": get("max_degree"),
            "length": get("length"),
            "washout": get("washout") if args.command == "ipc" else None,
            "threshold_mode": get("threshold_mode"),
            "export_targets": True if get("export_targets") else None,
            "full_report": True if get("full_report") else None,
        },
    }
    return sections


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    experiment = _SUBCOMMANDS[args.command]
    try:
        flags = _flag_sections(args)
        file_values = load_config_file(args.config) if args.config else {}
        if args.command == "converge" and (
            flags["model"]["h_grid"] is not None
            or flags["model"]["w_grid"] is not None
            or file_values.get("model", {}).get("h_grid") is not None
            or file_values.get("model", {}).get("w_grid") is not None
        ):
            experiment = "convergence_map"
        explicit_kind = file_values.get("experiment", {}).get("kind")
        if explicit_kind:
            if explicit_kind not in EXPERIMENTS:
                raise QRCLabError(f"unknown experiment kind {explicit_kind!r} in config")
            experiment = explicit_kind
        config = build_config(experiment, file_values, flags)
        if flags["experiment"]["output_dir"] is None and "output_dir" not in file_values.get("experiment", {}):
            from dataclasses import replace
            config = replace(config, output_dir=f"runs/{experiment}")
        if args.dry_run:
            print(json.dumps(config_json_dict(config), indent=2, sort_keys=True))
            print(json.dumps(estimate_cost(config), indent=2, sort_keys=True))
            return 0
        manifest = run_experiment(config)
        n_fail = len(manifest["failures"])
        print(f"wrote {config.output_dir} ({len(manifest['checksums'])} files, {n_fail} failures)")
        return 0 if n_fail == 0 else 1
    except QRCLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
