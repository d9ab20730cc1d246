"""Batch experiment orchestration with deterministic parallelism.

Each experiment decomposes into independent (cell, realization) work items.
Every item's randomness comes from a seed derived from (master seed,
experiment code, cell index, realization index), and aggregation is done by
item index, so output files are byte-identical for a given config no matter
how many worker processes execute the items or in which order they finish.

Worker count comes from ``--workers`` / config, falling back to the
``QRC_LAB_WORKERS`` environment variable, then to 1.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import partial
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ValidationError
from .learn import SplitSpec, solution_json_dict, train_eval
from .reservoir import (
    CONSERVED_COLUMNS,
    NAMED_INITIAL_STATES,
    Reservoir,
    clamp_distances,
    convergence_run,
    run_trajectory,
)
from .rng import derive_seed, rng_for
from .spectral import PHASE_CSV_COLUMNS, realization_mean_gap_ratio
from .spinmodel import ModelParams, sample_realization
from .tasks import (
    delay_target,
    enumerate_ipc_targets,
    generate_inputs,
    ipc_capacity,
    narma_target,
)

WORKERS_ENV_VAR = "QRC_LAB_WORKERS"

EXPERIMENTS = (
    "phase_diagram",
    "dynamics_trace",
    "convergence_map",
    "convergence_curve",
    "task_sweep",
    "ipc_sweep",
    "conserved_trace",
)

#: Stable integers mixed into seed derivation; order must never change.
EXPERIMENT_CODES = {name: i + 1 for i, name in enumerate(EXPERIMENTS)}

#: Realization counts per experiment family at the two supported scales.
PRESETS = {
    "paper": {"phase_diagram": 1200, "convergence": 600, "task": 100, "ipc": 10},
    "desk": {"phase_diagram": 200, "convergence": 20, "task": 20, "ipc": 5},
}

_PRESET_FAMILY = {
    "phase_diagram": "phase_diagram",
    "dynamics_trace": "task",
    "convergence_map": "convergence",
    "convergence_curve": "convergence",
    "task_sweep": "task",
    "ipc_sweep": "ipc",
    "conserved_trace": "task",
}

DEFAULT_GRID = tuple(np.logspace(-2, 2, 20))


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class ModelSection:
    n_spins: int = 10
    h: float = 1.0
    w: float = 0.0
    j_s: float = 1.0
    h_grid: tuple[float, ...] | None = None
    w_grid: tuple[float, ...] | None = None


@dataclass(frozen=True)
class ReservoirSection:
    dt: float = 10.0
    steps: int = 200
    pairs: int = 20
    input_kind: str = "uniform"
    input_lo: float = 0.0
    input_hi: float = 1.0
    init: str = "maximal_coherent"
    record_conserved: bool = False
    states: tuple[str, ...] = ("all_up_z", "all_down_z", "half_half_z", "half_half_x")


@dataclass(frozen=True)
class TaskSection:
    kind: str = "narma"
    order: int = 10
    delay: int = 10
    washout: int = 1000
    train: int = 2000
    test: int = 2000
    ridge: float = 0.0
    input_lo: float | None = None  # default depends on task kind
    input_hi: float | None = None

    def input_range(self) -> tuple[float, float]:
        if self.input_lo is not None and self.input_hi is not None:
            return (self.input_lo, self.input_hi)
        # recurrence targets need the divergence-safe range; plain delays do not
        return (0.0, 0.2) if self.kind == "narma" else (0.0, 1.0)

    def split(self) -> SplitSpec:
        return SplitSpec(washout=self.washout, train=self.train, test=self.test)


@dataclass(frozen=True)
class IpcSection:
    max_degree: int = 6
    length: int = 20000
    washout: int = 1000
    threshold_mode: str = "surrogate"
    window_d1: int = 100
    window_d2: int = 30
    window_higher: int = 15
    export_targets: bool = False
    full_report: bool = False

    def delay_windows(self) -> dict[int, int]:
        out = {1: self.window_d1, 2: self.window_d2}
        for d in range(3, self.max_degree + 1):
            out[d] = self.window_higher
        return out


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    output_dir: str = "runs/out"
    master_seed: int = 42
    realizations: int = 20
    workers: int | None = None
    preset: str | None = None
    model: ModelSection = field(default_factory=ModelSection)
    reservoir: ReservoirSection = field(default_factory=ReservoirSection)
    task: TaskSection = field(default_factory=TaskSection)
    ipc: IpcSection = field(default_factory=IpcSection)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValidationError(
                f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}"
            )
        if self.realizations < 1:
            raise ValidationError("realizations must be >= 1")
        if self.preset is not None and self.preset not in PRESETS:
            raise ValidationError(f"unknown preset {self.preset!r}")
        from .spinmodel import MAX_SPINS, MIN_SPINS  # early, before any item runs

        if not MIN_SPINS <= self.model.n_spins <= MAX_SPINS:
            raise ValidationError(
                f"n_spins must lie in [{MIN_SPINS}, {MAX_SPINS}], got {self.model.n_spins}"
            )

    def resolved_workers(self) -> int:
        if self.workers is not None:
            return max(1, int(self.workers))
        return max(1, int(os.environ.get(WORKERS_ENV_VAR, "1")))


def apply_preset(config: ExperimentConfig, explicit: set[str]) -> ExperimentConfig:
    """Fill preset-scale realizations unless the user pinned them."""
    if config.preset is None:
        return config
    scale = PRESETS[config.preset]
    if "realizations" not in explicit:
        config = replace(
            config, realizations=scale[_PRESET_FAMILY[config.experiment]]
        )
    return config


def parse_grid(spec: str) -> tuple[float, ...]:
    """Grid syntax: ``log:<lo_exp>:<hi_exp>:<num>`` or a comma list of values."""
    spec = spec.strip()
    if spec.startswith("log:"):
        parts = spec.split(":")
        if len(parts) != 4:
            raise ValidationError(f"bad grid spec {spec!r}; want log:lo:hi:num")
        lo, hi, num = float(parts[1]), float(parts[2]), int(parts[3])
        if num < 1:
            raise ValidationError("grid needs at least one point")
        return tuple(np.logspace(lo, hi, num))
    try:
        vals = tuple(float(v) for v in spec.split(",") if v.strip())
    except ValueError as exc:
        raise ValidationError(f"bad grid spec {spec!r}") from exc
    if not vals:
        raise ValidationError(f"empty grid spec {spec!r}")
    return vals


_SECTION_TYPES = {
    "experiment": {
        "kind": str, "output_dir": str, "master_seed": int,
        "realizations": int, "workers": int, "preset": str,
    },
    "model": {
        "n_spins": int, "h": float, "w": float, "j_s": float,
        "h_grid": parse_grid, "w_grid": parse_grid,
    },
    "reservoir": {
        "dt": float, "steps": int, "pairs": int, "input_kind": str,
        "input_lo": float, "input_hi": float, "init": str,
        "record_conserved": lambda v: v.lower() in ("1", "true", "yes"),
        "states": lambda v: tuple(s.strip() for s in v.split(",") if s.strip()),
    },
    "task": {
        "kind": str, "order": int, "delay": int, "washout": int,
        "train": int, "test": int, "ridge": float,
        "input_lo": float, "input_hi": float,
    },
    "ipc": {
        "max_degree": int, "length": int, "washout": int,
        "threshold_mode": str, "window_d1": int, "window_d2": int,
        "window_higher": int,
        "export_targets": lambda v: v.lower() in ("1", "true", "yes"),
        "full_report": lambda v: v.lower() in ("1", "true", "yes"),
    },
}


def load_config_file(path: str | Path) -> dict[str, dict]:
    """Parse an INI-style config into {section: {key: typed value}}."""
    parser = configparser.ConfigParser()
    read = parser.read(str(path))
    if not read:
        raise ValidationError(f"config file {path} not found or unreadable")
    out: dict[str, dict] = {}
    for section in parser.sections():
        if section not in _SECTION_TYPES:
            raise ValidationError(f"unknown config section [{section}]")
        types = _SECTION_TYPES[section]
        vals = {}
        for key, raw in parser.items(section):
            if key not in types:
                raise ValidationError(f"unknown key {key!r} in section [{section}]")
            try:
                vals[key] = types[key](raw)
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"bad value for [{section}] {key}: {raw!r}") from exc
        out[section] = vals
    return out


def build_config(
    experiment: str,
    file_values: dict[str, dict] | None = None,
    flag_values: dict[str, dict] | None = None,
) -> ExperimentConfig:
    """Merge defaults < preset < config file < CLI flags into a config."""
    file_values = file_values or {}
    flag_values = flag_values or {}

    def merged(section: str) -> dict:
        out = dict(file_values.get(section, {}))
        out.update({k: v for k, v in flag_values.get(section, {}).items() if v is not None})
        return out

    exp = merged("experiment")
    exp.pop("kind", None)
    explicit = set(exp)
    config = ExperimentConfig(
        experiment=experiment,
        model=ModelSection(**merged("model")),
        reservoir=ReservoirSection(**merged("reservoir")),
        task=TaskSection(**merged("task")),
        ipc=IpcSection(**merged("ipc")),
        **exp,
    )
    return apply_preset(config, explicit)


def config_json_dict(config: ExperimentConfig) -> dict:
    d = asdict(config)
    for sec in ("model",):
        for key in ("h_grid", "w_grid"):
            if d[sec][key] is not None:
                d[sec][key] = list(d[sec][key])
    d["reservoir"]["states"] = list(d["reservoir"]["states"])
    return d


# ---------------------------------------------------------------------------
# deterministic work execution

@dataclass(frozen=True)
class WorkItem:
    index: int
    context: dict
    payload: dict


def _guarded(func, item: WorkItem):
    try:
        return (item.index, None, func(item.payload))
    except Exception as exc:  # captured per item; the run continues
        return (item.index, f"{type(exc).__name__}: {exc}", None)


def execute_items(
    func, items: list[WorkItem], workers: int
) -> tuple[list, list[dict]]:
    """Run items, returning results ordered by index plus failure records."""
    if workers <= 1:
        raw = [_guarded(func, it) for it in items]
    else:
        chunk = max(1, len(items) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(partial(_guarded, func), items, chunksize=chunk))
    results = [None] * len(items)
    failures = []
    for idx, err, value in raw:
        if err is None:
            results[idx] = value
        else:
            failures.append({"context": items[idx].context, "error": err})
    return results, failures


# ---------------------------------------------------------------------------
# output helpers

def format_number(v) -> str:
    """CSV cell format: strings verbatim, integers plain, floats at 17
    significant digits (lossless for doubles)."""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(path: Path, header: tuple[str, ...], rows) -> None:
    with open(path, "w", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(format_number(v) for v in row) + "\n")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_json(path: Path, data: dict) -> None:
    with open(path, "w") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")


# ---------------------------------------------------------------------------
# per-item functions (top level so worker processes can unpickle them)

def _phase_item(p: dict) -> tuple[float, int]:
    params = ModelParams(
        n_spins=p["n_spins"], h=p["h"], w=p["w"], j_s=p["j_s"], seed=p["seed"]
    )
    return realization_mean_gap_ratio(params, p["sector"])


def _reservoir_for(p: dict) -> Reservoir:
    params = ModelParams(
        n_spins=p["n_spins"], h=p["h"], w=p["w"], j_s=p["j_s"], seed=p["seed"]
    )
    return Reservoir(sample_realization(params), dt=p["dt"])


def _convergence_item(p: dict) -> np.ndarray:
    res = _reservoir_for(p)
    inputs = generate_inputs(
        p["input_kind"], p["steps"], rng=np.random.default_rng(p["input_seed"]),
        lo=p["input_lo"], hi=p["input_hi"],
    )
    return convergence_run(res, inputs, p["seed_a"], p["seed_b"])


def _task_item(p: dict) -> dict:
    res = _reservoir_for(p)
    split = SplitSpec(washout=p["washout"], train=p["train"], test=p["test"])
    lo, hi = p["input_lo"], p["input_hi"]
    inputs = np.random.default_rng(p["input_seed"]).uniform(lo, hi, split.total)
    traj = run_trajectory(res, inputs, init=p["init"])
    if p["task_kind"] == "narma":
        target = narma_target(inputs, p["order"])
    else:
        target = delay_target(inputs, p["delay"])
    result = train_eval(traj.design, target, split, ridge=p["ridge"])
    return solution_json_dict(result, split, p["ridge"])


def _ipc_item(p: dict) -> dict:
    res = _reservoir_for(p)
    raw = np.random.default_rng(p["input_seed"]).uniform(-1.0, 1.0, p["length"])
    traj = run_trajectory(res, (1.0 + raw) / 2.0, init=p["init"])
    report = ipc_capacity(
        traj.design,
        raw,
        max_degree=p["max_degree"],
        delay_windows=p["delay_windows"],
        washout=p["washout"],
        threshold_mode=p["threshold_mode"],
        surrogate_seed=p["surrogate_seed"],
    )
    return report.to_json_dict(include_targets=p["full_report"])


def _trajectory_item(p: dict) -> dict:
    res = _reservoir_for(p)
    inputs = generate_inputs(
        p["input_kind"], p["steps"], rng=np.random.default_rng(p["input_seed"]),
        lo=p["input_lo"], hi=p["input_hi"],
    )
    init_rng = np.random.default_rng(p["init_seed"]) if p["init"] == "random" else None
    traj = run_trajectory(
        res, inputs, init=p["init"], init_rng=init_rng,
        record_conserved=p["record_conserved"],
    )
    return {
        "inputs": traj.inputs,
        "design": traj.design.data,
        "labels": traj.design.labels,
        "conserved": traj.conserved,
    }


# ---------------------------------------------------------------------------
# experiment runners

def _grid_cells(config: ExperimentConfig) -> list[tuple[float, float]]:
    """Cells for sweep experiments: grid product, or single (h, w) point."""
    m = config.model
    if m.h_grid is not None and m.w_grid is not None:
        return [(h, w) for h in m.h_grid for w in m.w_grid]
    if m.h_grid is not None:
        return [(h, m.w) for h in m.h_grid]
    if m.w_grid is not None:
        return [(m.h, w) for w in m.w_grid]
    return [(m.h, m.w)]


def _model_payload(config: ExperimentConfig, h: float, w: float, seed: int) -> dict:
    return {
        "n_spins": config.model.n_spins,
        "h": float(h),
        "w": float(w),
        "j_s": config.model.j_s,
        "seed": seed,
        "dt": config.reservoir.dt,
    }


def _run_phase_diagram(config: ExperimentConfig, out: Path, workers: int):
    m = config.model
    h_grid = m.h_grid if m.h_grid is not None else DEFAULT_GRID
    w_grid = m.w_grid if m.w_grid is not None else DEFAULT_GRID
    code = EXPERIMENT_CODES[config.experiment]
    items = []
    for cell, (h, w) in enumerate((h, w) for h in h_grid for w in w_grid):
        for k in range(config.realizations):
            seed = derive_seed(config.master_seed, code, cell, k)
            items.append(
                WorkItem(
                    index=len(items),
                    context={"h": h, "w": w, "realization": k},
                    payload={
                        "n_spins": m.n_spins, "h": float(h), "w": float(w),
                        "j_s": m.j_s, "seed": seed, "sector": "even",
                    },
                )
            )
    results, failures = execute_items(_phase_item, items, workers)
    rows = []
    pos = 0
    for h in h_grid:
        for w in w_grid:
            chunk = [r for r in results[pos : pos + config.realizations] if r is not None]
            pos += config.realizations
            means = np.array([r[0] for r in chunk])
            dropped = int(sum(r[1] for r in chunk))
            if means.size == 0:
                rows.append((h, w, float("nan"), float("nan"), 0, dropped))
                continue
            stderr = float(means.std(ddof=1) / np.sqrt(means.size)) if means.size > 1 else 0.0
            rows.append((h, w, float(means.mean()), stderr, means.size, dropped))
    write_csv(out / "phase_diagram.csv", PHASE_CSV_COLUMNS, rows)
    return failures, {}


def _run_convergence(config: ExperimentConfig, out: Path, workers: int):
    """Shared driver for convergence_curve (per-step) and convergence_map (finals)."""
    r = config.reservoir
    code = EXPERIMENT_CODES[config.experiment]
    cells = _grid_cells(config)
    items = []
    for cell, (h, w) in enumerate(cells):
        for k in range(config.realizations):
            payload = _model_payload(
                config, h, w, derive_seed(config.master_seed, code, cell, k, 0)
            )
            payload.update(
                steps=r.steps,
                input_kind=r.input_kind,
                input_lo=r.input_lo,
                input_hi=r.input_hi,
                input_seed=derive_seed(config.master_seed, code, cell, k, 1),
                seed_a=derive_seed(config.master_seed, code, cell, k, 2),
                seed_b=derive_seed(config.master_seed, code, cell, k, 3),
            )
            items.append(
                WorkItem(
                    index=len(items),
                    context={"h": h, "w": w, "pair": k},
                    payload=payload,
                )
            )
    results, failures = execute_items(_convergence_item, items, workers)

    summary = {"cells": []}
    if config.experiment == "convergence_curve":
        curves = [c for c in results if c is not None]
        if curves:
            stack = np.vstack(curves)
            med = np.median(stack, axis=0)
            rows = [
                (step, med[step], float(clamp_distances(med[step : step + 1])[0]))
                for step in range(med.size)
            ]
            write_csv(
                out / "convergence_curve.csv",
                ("step", "distance_raw", "distance_clamped"),
                rows,
            )
            summary["cells"].append(
                {
                    "h": cells[0][0], "w": cells[0][1],
                    "final_raw_per_pair": [float(c[-1]) for c in curves],
                    "median_final_raw": float(np.median(stack[:, -1])),
                }
            )
    else:
        rows = []
        pos = 0
        for h, w in cells:
            chunk = [c for c in results[pos : pos + config.realizations] if c is not None]
            pos += config.realizations
            if not chunk:
                rows.append((h, w, float("nan"), float("nan"), 0))
                continue
            finals = np.array([c[-1] for c in chunk])
            med = float(np.median(finals))
            rows.append((h, w, med, float(clamp_distances(np.array([med]))[0]), finals.size))
            summary["cells"].append(
                {"h": float(h), "w": float(w), "median_final_raw": med, "n_pairs": finals.size}
            )
        write_csv(
            out / "convergence_map.csv",
            ("h", "w", "final_distance_raw", "final_distance_clamped", "n_pairs"),
            rows,
        )
    _write_json(out / "summary.json", summary)
    return failures, {}


def _run_task_sweep(config: ExperimentConfig, out: Path, workers: int):
    t = config.task
    if t.kind not in ("narma", "delay"):
        raise ValidationError(f"unknown task kind {t.kind!r}")
    code = EXPERIMENT_CODES[config.experiment]
    cells = _grid_cells(config)
    lo, hi = t.input_range()
    items = []
    for cell, (h, w) in enumerate(cells):
        for k in range(config.realizations):
            payload = _model_payload(
                config, h, w, derive_seed(config.master_seed, code, cell, k, 0)
            )
            payload.update(
                washout=t.washout, train=t.train, test=t.test, ridge=t.ridge,
                input_lo=lo, input_hi=hi,
                input_seed=derive_seed(config.master_seed, code, cell, k, 1),
                task_kind=t.kind, order=t.order, delay=t.delay,
                init=config.reservoir.init,
            )
            items.append(
                WorkItem(
                    index=len(items),
                    context={"h": h, "w": w, "realization": k},
                    payload=payload,
                )
            )
    results, failures = execute_items(_task_item, items, workers)

    rows = []
    summary_cells = []
    pos = 0
    for h, w in cells:
        chunk = [r for r in results[pos : pos + config.realizations] if r is not None]
        pos += config.realizations
        cs = np.array([r["c_test"] for r in chunk])
        if cs.size == 0:
            rows.append((h, w, float("nan"), float("nan"), float("nan"), 0))
            continue
        std = float(cs.std(ddof=1)) if cs.size > 1 else 0.0
        stderr = std / np.sqrt(cs.size) if cs.size > 1 else 0.0
        rows.append((h, w, float(cs.mean()), std, stderr, cs.size))
        summary_cells.append(
            {
                "h": float(h), "w": float(w),
                "mean_c": float(cs.mean()), "std_c": std, "stderr_c": stderr,
                "c_test_values": [float(v) for v in cs],
                "c_train_values": [float(r["c_train"]) for r in chunk],
                "first_solution": chunk[0],
            }
        )
    write_csv(
        out / "task_sweep.csv",
        ("h", "w", "mean_c", "std_c", "stderr_c", "n_realizations"),
        rows,
    )
    _write_json(
        out / "summary.json",
        {"task": t.kind, "order": t.order, "delay": t.delay, "cells": summary_cells},
    )
    return failures, {}


def _run_ipc_sweep(config: ExperimentConfig, out: Path, workers: int):
    p = config.ipc
    code = EXPERIMENT_CODES[config.experiment]
    cells = _grid_cells(config)
    items = []
    for cell, (h, w) in enumerate(cells):
        for k in range(config.realizations):
            payload = _model_payload(
                config, h, w, derive_seed(config.master_seed, code, cell, k, 0)
            )
            payload.update(
                length=p.length, washout=p.washout, max_degree=p.max_degree,
                delay_windows=p.delay_windows(), threshold_mode=p.threshold_mode,
                surrogate_seed=derive_seed(config.master_seed, code, cell, k, 2),
                input_seed=derive_seed(config.master_seed, code, cell, k, 1),
                init=config.reservoir.init, full_report=p.full_report,
            )
            items.append(
                WorkItem(
                    index=len(items),
                    context={"h": h, "w": w, "realization": k},
                    payload=payload,
                )
            )
    results, failures = execute_items(_ipc_item, items, workers)

    rows = []
    summary_cells = []
    pos = 0
    for h, w in cells:
        chunk = results[pos : pos + config.realizations]
        pos += config.realizations
        totals = []
        for k, rep in enumerate(chunk):
            if rep is None:
                continue
            totals.append(rep["normalized_total"])
            for d_str in sorted(rep["per_degree"], key=int):
                rows.append(
                    (
                        h, w, k, int(d_str),
                        rep["per_degree"][d_str],
                        rep["thresholds"][d_str],
                        rep["counted"][d_str],
                    )
                )
        if totals:
            summary_cells.append(
                {
                    "h": float(h), "w": float(w),
                    "normalized_totals": totals,
                    "mean_normalized_total": float(np.mean(totals)),
                    "std_normalized_total": float(np.std(totals, ddof=1)) if len(totals) > 1 else 0.0,
                }
            )
    write_csv(
        out / "ipc_sweep.csv",
        ("h", "w", "realization", "degree", "capacity", "threshold", "n_targets_counted"),
        rows,
    )
    extra = {}
    if p.export_targets:
        targets = enumerate_ipc_targets(p.max_degree, p.delay_windows())
        write_csv(
            out / "ipc_targets.csv",
            ("position", "degree", "max_delay", "label"),
            [(i, t.degree, t.max_delay, t.label) for i, t in enumerate(targets)],
        )
    _write_json(out / "summary.json", {"cells": summary_cells})
    return failures, extra


def _run_dynamics_trace(config: ExperimentConfig, out: Path, workers: int):
    r = config.reservoir
    code = EXPERIMENT_CODES[config.experiment]
    payload = _model_payload(
        config, config.model.h, config.model.w,
        derive_seed(config.master_seed, code, 0, 0, 0),
    )
    payload.update(
        steps=r.steps, input_kind=r.input_kind,
        input_lo=r.input_lo, input_hi=r.input_hi,
        input_seed=derive_seed(config.master_seed, code, 0, 0, 1),
        init=r.init, init_seed=derive_seed(config.master_seed, code, 0, 0, 2),
        record_conserved=r.record_conserved,
    )
    items = [WorkItem(index=0, context={"h": payload["h"], "w": payload["w"]}, payload=payload)]
    results, failures = execute_items(_trajectory_item, items, workers)
    if results[0] is not None:
        _write_trajectory_csv(out / "trajectory.csv", results[0])
    return failures, {}


def _write_trajectory_csv(path: Path, tr: dict) -> None:
    header = ("step", "input") + tuple(tr["labels"])
    conserved = tr["conserved"]
    if conserved is not None:
        header = header + CONSERVED_COLUMNS
    rows = []
    for k in range(len(tr["inputs"])):
        row = [k, tr["inputs"][k]] + list(tr["design"][k])
        if conserved is not None:
            row += list(conserved[k])
        rows.append(tuple(row))
    write_csv(path, header, rows)


def _run_conserved_trace(config: ExperimentConfig, out: Path, workers: int):
    r = config.reservoir
    code = EXPERIMENT_CODES[config.experiment]
    for state in r.states:
        if state not in NAMED_INITIAL_STATES:
            raise ValidationError(f"unknown initial state {state!r}")
    model_seed = derive_seed(config.master_seed, code, 0, 0, 0)
    input_seed = derive_seed(config.master_seed, code, 0, 0, 1)  # shared by all states
    items = []
    for i, state in enumerate(r.states):
        payload = _model_payload(config, config.model.h, config.model.w, model_seed)
        payload.update(
            steps=r.steps, input_kind=r.input_kind,
            input_lo=r.input_lo, input_hi=r.input_hi,
            input_seed=input_seed, init=state,
            init_seed=derive_seed(config.master_seed, code, 0, 0, 3 + i),
            record_conserved=True,
        )
        items.append(WorkItem(index=i, context={"state": state}, payload=payload))
    results, failures = execute_items(_trajectory_item, items, workers)
    energies = {}
    for state, tr in zip(r.states, results):
        if tr is None:
            continue
        _write_trajectory_csv(out / f"conserved_{state}.csv", tr)
        energies[state] = tr["conserved"][:, 1]
    summary = {"states": list(r.states)}
    if len(energies) >= 2:
        stack = np.vstack(list(energies.values()))
        spread = stack.max(axis=0) - stack.min(axis=0)
        summary["energy_spread_initial"] = float(spread[0])
        summary["energy_spread_final"] = float(spread[-1])
    _write_json(out / "summary.json", summary)
    return failures, {}


_RUNNERS = {
    "phase_diagram": _run_phase_diagram,
    "dynamics_trace": _run_dynamics_trace,
    "convergence_map": _run_convergence,
    "convergence_curve": _run_convergence,
    "task_sweep": _run_task_sweep,
    "ipc_sweep": _run_ipc_sweep,
    "conserved_trace": _run_conserved_trace,
}


def estimate_cost(config: ExperimentConfig) -> dict:
    """Rough single-worker cost model printed by --dry-run."""
    dim = 1 << config.model.n_spins
    cells = 1
    if config.experiment == "phase_diagram":
        m = config.model
        cells = len(m.h_grid or DEFAULT_GRID) * len(m.w_grid or DEFAULT_GRID)
        steps_per_item = 0
    else:
        cells = len(_grid_cells(config))
        if config.experiment in ("convergence_map", "convergence_curve"):
            steps_per_item = 2 * config.reservoir.steps
        elif config.experiment == "task_sweep":
            steps_per_item = config.task.split().total
        elif config.experiment == "ipc_sweep":
            steps_per_item = config.ipc.length
        else:
            steps_per_item = config.reservoir.steps
    items = cells * (config.realizations if config.experiment != "conserved_trace" else len(config.reservoir.states))
    if config.experiment == "dynamics_trace":
        items = 1
    # measured on one core: complex matmul ~ 1.1e-10 * dim^3 s, eigh similar order
    diag_s = 2.5e-10 * dim**3
    step_s = 2.2e-10 * dim**3
    est = items * (diag_s + steps_per_item * step_s)
    return {
        "items": items,
        "matrix_dim": dim,
        "steps_per_item": steps_per_item,
        "estimated_seconds_single_worker": round(est, 1),
    }


def run_experiment(config: ExperimentConfig) -> dict:
    """Execute one experiment and write CSVs plus a manifest beside them.

    Returns the manifest dict.  Output data files depend only on the
    resolved config (not on worker count or timing); the manifest records
    config, seed scheme, checksums, wall time, and any per-item failures.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    workers = config.resolved_workers()
    started = time.time()
    failures, extra = _RUNNERS[config.experiment](config, out, workers)
    wall = time.time() - started
    checksums = {
        f.name: _sha256(f)
        for f in sorted(out.iterdir())
        if f.suffix in (".csv", ".json") and f.name != "manifest.json"
    }
    manifest = {
        "experiment": config.experiment,
        "config": config_json_dict(config),
        "code_version": __version__,
        "seeds": {
            "master_seed": config.master_seed,
            "experiment_code": EXPERIMENT_CODES[config.experiment],
            "scheme": "seedsequence(master_seed, experiment_code, cell_index, realization_index, purpose)",
        },
        "workers": workers,
        "wall_time_s": wall,
        "failures": failures,
        "checksums": checksums,
    }
    manifest.update(extra)
    _write_json(out / "manifest.json", manifest)
    return manifest
