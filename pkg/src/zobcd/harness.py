"""Experiment runner: seeded repeats, trace export, and summary statistics.

An experiment spec is a single JSON document; see README for the schema.
Each repeat r runs with master seed ``seed + r`` and writes one trace file
(CSV columns: iteration, cumulative_queries, f_value, compute_nanos), plus a
shared summary.json.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from zobcd.core import ConfigurationError, ConvergenceTrace, NoiseModel, RngStreams, make_noisy_oracle
from zobcd.baselines import BaselineConfig, run_baseline
from zobcd.objectives import OBJECTIVES, make_objective
from zobcd.optimizer import RunResult, ZobcdConfig, run_zobcd

METHOD_NAMES = ("zobcd-r", "zobcd-rc", "fdsa", "spsa", "zoscd")
TRACE_COLUMNS = ("iteration", "cumulative_queries", "f_value", "compute_nanos")


@dataclass
class ExperimentSpec:
    objective: dict
    method: str
    params: dict
    repeats: int = 1
    seed: int = 0
    noise: dict = field(default_factory=lambda: {"kind": "none", "level": 0.0})
    x0_scale: float = 1.0
    format: str = "csv"
    record_timing: bool = True

    def __post_init__(self):
        if self.method not in METHOD_NAMES:
            raise ConfigurationError(f"unknown method {self.method!r} (choose from {METHOD_NAMES})")
        name = self.objective.get("name")
        if name not in OBJECTIVES:
            raise ConfigurationError(f"unknown objective {name!r} (choose from {OBJECTIVES})")
        if self.repeats < 1:
            raise ConfigurationError(f"repeats must be >= 1, got {self.repeats}")
        if self.format not in ("csv", "json"):
            raise ConfigurationError(f"format must be 'csv' or 'json', got {self.format!r}")

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentSpec":
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read experiment spec {path}: {exc}") from exc
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ConfigurationError(f"unknown spec keys: {sorted(unknown)}")
        missing = {"objective", "method", "params"} - set(doc)
        if missing:
            raise ConfigurationError(f"spec is missing required keys: {sorted(missing)}")
        return cls(**doc)


def run_single(spec: ExperimentSpec, run_seed: int) -> RunResult:
    """One seeded run of the spec's method on a fresh objective instance."""
    streams = RngStreams(run_seed)
    obj_rng = streams.substream("objective")
    obj = make_objective(
        spec.objective["name"],
        int(spec.objective["d"]),
        int(spec.objective["s"]),
        obj_rng,
        coeff=float(spec.objective.get("coeff", 1.0)),
    )
    x0 = spec.x0_scale * obj_rng.standard_normal(obj.d)
    noise = NoiseModel(spec.noise.get("kind", "none"), float(spec.noise.get("level", 0.0)))
    oracle = make_noisy_oracle(obj.eval, noise, streams)

    p = dict(spec.params)
    if spec.method in ("zobcd-r", "zobcd-rc"):
        cfg = ZobcdConfig(
            variant="R" if spec.method == "zobcd-r" else "RC",
            d=obj.d,
            s=int(spec.objective["s"]),
            seed=run_seed,
            **p,
        )
        return run_zobcd(oracle, x0, cfg, report_f=obj.eval)
    p.pop("target_queries", None)
    cfg = BaselineConfig(method=spec.method, seed=run_seed, **p)
    return run_baseline(oracle, x0, cfg, report_f=obj.eval)


def _write_trace(trace: ConvergenceTrace, path: Path, fmt: str, record_timing: bool):
    rows = [
        (r.iteration, r.cumulative_queries, r.f_value, r.compute_nanos if record_timing else 0)
        for r in trace.records
    ]
    if fmt == "csv":
        lines = [",".join(TRACE_COLUMNS)]
        lines += [f"{it},{q},{repr(f)},{ns}" for it, q, f, ns in rows]
        path.write_text("\n".join(lines) + "\n")
    else:
        doc = [dict(zip(TRACE_COLUMNS, row)) for row in rows]
        path.write_text(json.dumps(doc, indent=1) + "\n")


def read_trace(path: str | Path) -> ConvergenceTrace:
    path = Path(path)
    trace = ConvergenceTrace()
    if path.suffix == ".json":
        for row in json.loads(path.read_text()):
            trace.append(*(row[c] for c in TRACE_COLUMNS))
        return trace
    lines = path.read_text().splitlines()
    if not lines or lines[0] != ",".join(TRACE_COLUMNS):
        raise ConfigurationError(f"{path} is not a trace file")
    for line in lines[1:]:
        it, q, f, ns = line.split(",")
        trace.append(int(it), int(q), float(f), int(ns))
    return trace


def _first_hit(trace: ConvergenceTrace, target: float | None):
    """(iteration, queries) of the first record at or below target."""
    if target is None:
        return "unreached", "unreached"
    for r in trace.records:
        if r.f_value <= target:
            return r.iteration, r.cumulative_queries
    return "unreached", "unreached"


def _median_iqr(values: list) -> dict:
    """Order statistics with 'unreached' treated as +inf."""
    nums = sorted(math.inf if v == "unreached" else float(v) for v in values)
    k = len(nums)
    med = nums[k // 2] if k % 2 else 0.5 * (nums[k // 2 - 1] + nums[k // 2])
    q1 = nums[int(0.25 * (k - 1))]
    q3 = nums[int(0.75 * (k - 1))]
    fmt = lambda v: "unreached" if math.isinf(v) else v
    return {
        "median": fmt(med),
        "iqr": [fmt(q1), fmt(q3)],
        "unreached_count": sum(1 for v in nums if math.isinf(v)),
    }


def summarize(traces: list[ConvergenceTrace], target: float | None, terminations=None) -> dict:
    if not traces:
        raise ConfigurationError("summarize needs at least one trace")
    runs = []
    for i, trace in enumerate(traces):
        it_hit, q_hit = _first_hit(trace, target)
        iter_records = [r for r in trace.records if r.iteration > 0]
        runs.append(
            {
                "run": i,
                "termination": terminations[i] if terminations else None,
                "iterations": max(r.iteration for r in trace.records),
                "total_queries": trace.records[-1].cumulative_queries,
                "iterations_to_target": it_hit,
                "queries_to_target": q_hit,
                "mean_iter_compute_ns": (
                    float(np.mean([r.compute_nanos for r in iter_records])) if iter_records else 0.0
                ),
            }
        )
    return {
        "target": target,
        "runs": runs,
        "iterations_to_target": _median_iqr([r["iterations_to_target"] for r in runs]),
        "queries_to_target": _median_iqr([r["queries_to_target"] for r in runs]),
    }


def run_experiment(spec: ExperimentSpec, out_dir: str | Path) -> dict:
    """Execute all repeats, write trace files and summary.json, return the summary."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigurationError(f"cannot create output directory {out}: {exc}") from exc
    ext = "csv" if spec.format == "csv" else "json"
    traces, terminations = [], []
    for r in range(spec.repeats):
        result = run_single(spec, spec.seed + r)
        _write_trace(result.trace, out / f"trace_{r:03d}.{ext}", spec.format, spec.record_timing)
        traces.append(result.trace)
        terminations.append(result.termination)
    summary = summarize(traces, spec.params.get("target"), terminations)
    summary["spec"] = {
        "objective": spec.objective,
        "method": spec.method,
        "params": spec.params,
        "noise": spec.noise,
        "x0_scale": spec.x0_scale,
        "repeats": spec.repeats,
        "seed": spec.seed,
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=1)
    return summary
