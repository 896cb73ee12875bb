"""Experiment configuration, seeded sweep execution, summary statistics, and
persistence.

A sweep evaluates one estimator over an (eps, delta) grid times a list of
seeds. Every trial draws its generators from (seed, indices), so outputs are
independent of worker scheduling; the canonical records CSV is byte-identical
across reruns (wall-clock timings go to a separate sidecar file).
"""

from __future__ import annotations

import csv
import json
import math
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .boosting import BoostConfig, graph_boost
from .estimators import BoundedDegreeEstimator, reduce_to_node_private
from .graphs import SbmParams, WeightModel, sample_sbm, sample_weighted_sbm
from .metrics import loss_overall, loss_worst_case
from .registry import ESTIMATOR_IDS, make_bounded_base, run_pipeline
from .rng import spawn

RECORD_COLUMNS = [
    "scenario", "estimator", "grid_index", "eps", "delta", "D", "seed",
    "status", "error", "loss_overall", "loss_worst_case", "noise_off",
    "budget_chain", "diagnostics",
]


@dataclass
class ExperimentConfig:
    scenario: str
    sbm: dict
    estimator: dict  # {"id": ..., "params": {...}}
    eps_grid: list
    seeds: list
    delta_grid: list = field(default_factory=lambda: [1e-6])
    wrapper: dict | None = None  # {"D_rule": {...}, "eps1": ..., "delta1": ...}
    boost: dict | None = None  # {"T": ..., "xi": ...}
    noise_off: bool = False

    def __post_init__(self):
        if self.estimator.get("id") not in ESTIMATOR_IDS:
            raise ValueError(f"unknown estimator id {self.estimator.get('id')!r}")
        if not self.eps_grid or not self.delta_grid or not self.seeds:
            raise ValueError("eps_grid, delta_grid, and seeds must be non-empty")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls(**json.loads(text))

    def sbm_params(self) -> SbmParams:
        s = self.sbm
        wm = None
        if s.get("weight_model"):
            wm = WeightModel(
                means=np.asarray(s["weight_model"]["means"], dtype=float),
                scale=float(s["weight_model"]["scale"]),
            )
        return SbmParams(n=int(s["n"]), k=int(s["k"]),
                         B=np.asarray(s["B"], dtype=float), weight_model=wm)

    def resolve_D(self, params: SbmParams) -> int:
        rule = (self.wrapper or {}).get("D_rule", {"mode": "multiple_of_d", "value": 3.0})
        if rule["mode"] == "absolute":
            return int(rule["value"])
        if rule["mode"] == "multiple_of_d":
            return int(math.ceil(float(rule["value"]) * params.d))
        raise ValueError(f"unknown D rule {rule!r}")


@dataclass
class TrialRecord:
    scenario: str
    estimator: str
    grid_index: int
    eps: float
    delta: float
    D: int | None
    seed: int
    status: str  # "ok" | "failed"
    error: str
    loss_overall: float | None
    loss_worst_case: float | None
    runtime_ms: float
    noise_off: bool
    diagnostics: dict
    budget_chain: list

    def csv_row(self) -> list:
        return [
            self.scenario, self.estimator, self.grid_index,
            repr(self.eps), repr(self.delta),
            "" if self.D is None else self.D, self.seed,
            self.status, self.error,
            "" if self.loss_overall is None else repr(self.loss_overall),
            "" if self.loss_worst_case is None else repr(self.loss_worst_case),
            int(self.noise_off),
            json.dumps(self.budget_chain, sort_keys=True),
            json.dumps(self.diagnostics, sort_keys=True, default=repr),
        ]


def _run_trial(cfg: ExperimentConfig, grid_index: int, eps: float, delta: float,
               seed: int) -> TrialRecord:
    params = cfg.sbm_params()
    est_id = cfg.estimator["id"]
    est_params = dict(cfg.estimator.get("params", {}))
    est_params.setdefault("k", params.k)
    est_params.setdefault("B", np.asarray(params.B).tolist())
    start = time.perf_counter()
    D = cfg.resolve_D(params) if cfg.wrapper is not None else est_params.get("D")
    try:
        graph_rng = spawn(seed, 0)
        if params.weight_model is not None and est_id == "subspace_estimation":
            graph = sample_weighted_sbm(params, graph_rng)
        else:
            graph = sample_sbm(params, graph_rng)
        mech_seed = spawn(seed, 1, grid_index)
        if cfg.wrapper is not None:
            D = cfg.resolve_D(params)
            base = make_bounded_base(est_id, params.k, D, est_params)
            eps1 = float(cfg.wrapper.get("eps1", 1.0))
            delta1 = float(cfg.wrapper.get("delta1", 1e-6))
            if cfg.boost is not None:
                bcfg = BoostConfig(T=int(cfg.boost["T"]), xi=float(cfg.boost["xi"]),
                                   k=params.k)

                def reduced_run(graph_j, e, d, s, noise_off=False):
                    return reduce_to_node_private(
                        graph_j, base, D, eps1, delta1, e, d, s, noise_off=noise_off
                    )

                reduced = BoundedDegreeEstimator(f"reduced({est_id})", "approx",
                                                 reduced_run)
                out = graph_boost(graph, bcfg, reduced, eps, delta,
                                  seed=int(seed), noise_off=cfg.noise_off)
            else:
                out = reduce_to_node_private(
                    graph, base, D, eps1, delta1, eps, delta,
                    seed=mech_seed, noise_off=cfg.noise_off,
                )
        else:
            est_params["eps"] = eps
            est_params["delta"] = delta
            out = run_pipeline(est_id, graph, est_params, mech_seed,
                               noise_off=cfg.noise_off)
        runtime = 1000.0 * (time.perf_counter() - start)
        if out.labels is None:
            return TrialRecord(
                cfg.scenario, est_id, grid_index, eps, delta, D, seed,
                "failed", out.diagnostics.get("failure", "estimator-failure"),
                None, None, runtime, cfg.noise_off, out.diagnostics,
                [b.to_dict() for b in out.budget],
            )
        lo = loss_overall(out.labels, params.theta)
        lw = loss_worst_case(out.labels, params.theta)
        return TrialRecord(
            cfg.scenario, est_id, grid_index, eps, delta, D, seed, "ok", "",
            lo, lw, runtime, cfg.noise_off, out.diagnostics,
            [b.to_dict() for b in out.budget],
        )
    except Exception as exc:  # crash isolation: typed failure row
        runtime = 1000.0 * (time.perf_counter() - start)
        return TrialRecord(
            cfg.scenario, est_id, grid_index, eps, delta, D, seed,
            "failed", type(exc).__name__, None, None, runtime, cfg.noise_off,
            {"traceback": traceback.format_exc(limit=3)}, [],
        )


def run_sweep(cfg: ExperimentConfig, threads: int = 1) -> list[TrialRecord]:
    """One record per (grid point x seed); failures become typed rows."""
    grid = [(gi, eps, delta)
            for gi, (eps, delta) in enumerate(
                (e, d) for e in cfg.eps_grid for d in cfg.delta_grid)]
    tasks = [(gi, eps, delta, seed) for gi, eps, delta in grid for seed in cfg.seeds]
    if threads <= 1:
        return [_run_trial(cfg, *t) for t in tasks]
    records = [None] * len(tasks)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(_run_trial, cfg, *t): i for i, t in enumerate(tasks)}
        for fut, i in futures.items():
            records[i] = fut.result()
    return records


def _quantile(sorted_values, q):
    return float(np.quantile(np.asarray(sorted_values), q, method="linear"))


def summarize(records: list[TrialRecord]) -> list[dict]:
    """Per grid point: median and 10/90 quantiles of both losses, failure rate."""
    if not records:
        raise ValueError("no records to summarize")
    groups: dict = {}
    for r in records:
        groups.setdefault((r.grid_index, r.eps, r.delta), []).append(r)
    out = []
    for (gi, eps, delta), rs in sorted(groups.items()):
        ok = [r for r in rs if r.status == "ok"]
        row = {
            "grid_index": gi, "eps": eps, "delta": delta,
            "trials": len(rs), "failure_rate": 1.0 - len(ok) / len(rs),
        }
        for name in ("loss_overall", "loss_worst_case"):
            vals = sorted(getattr(r, name) for r in ok)
            if vals:
                row[f"{name}_median"] = _quantile(vals, 0.5)
                row[f"{name}_q10"] = _quantile(vals, 0.1)
                row[f"{name}_q90"] = _quantile(vals, 0.9)
            else:
                row[f"{name}_median"] = None
                row[f"{name}_q10"] = None
                row[f"{name}_q90"] = None
        out.append(row)
    return out


def write_records_csv(records: list[TrialRecord], path) -> None:
    """Canonical deterministic record file (timings are written separately)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_COLUMNS)
        for r in records:
            w.writerow(r.csv_row())


def write_timings_csv(records: list[TrialRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["grid_index", "eps", "delta", "seed", "runtime_ms"])
        for r in records:
            w.writerow([r.grid_index, repr(r.eps), repr(r.delta), r.seed,
                        f"{r.runtime_ms:.3f}"])


def write_summary_json(summary: list[dict], path) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_plotdata_csv(records: list[TrialRecord], path) -> None:
    """Tidy long-format CSV for external plotting."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scenario", "estimator", "eps", "delta", "D", "seed",
                    "metric", "value"])
        for r in records:
            if r.status != "ok":
                continue
            for metric in ("loss_overall", "loss_worst_case"):
                w.writerow([r.scenario, r.estimator, repr(r.eps), repr(r.delta),
                            "" if r.D is None else r.D, r.seed, metric,
                            repr(getattr(r, metric))])
