import json

import numpy as np
import pytest

from nodedp.harness import (
    ExperimentConfig,
    TrialRecord,
    run_sweep,
    summarize,
    write_plotdata_csv,
    write_records_csv,
    write_summary_json,
    write_timings_csv,
)


def base_config(**overrides):
    cfg = dict(
        scenario="unit",
        sbm={"n": 60, "k": 2, "B": [[0.6, 0.1], [0.1, 0.6]]},
        estimator={"id": "ef_spectral", "params": {"gamma": 1.0}},
        eps_grid=[2.0],
        delta_grid=[0.0],
        seeds=[0],
    )
    cfg.update(overrides)
    return ExperimentConfig(**cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        base_config(estimator={"id": "nope", "params": {}})
    with pytest.raises(ValueError):
        base_config(eps_grid=[])
    with pytest.raises(ValueError):
        base_config(seeds=[])


def test_single_point_single_seed_one_record():
    records = run_sweep(base_config())
    assert len(records) == 1
    assert records[0].status == "ok"
    assert 0.0 <= records[0].loss_overall <= 2.0


def test_rerun_byte_identical_csv(tmp_path):
    cfg = base_config(eps_grid=[1.0, 4.0], seeds=[0, 1, 2])
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_records_csv(run_sweep(cfg), p1)
    write_records_csv(run_sweep(base_config(eps_grid=[1.0, 4.0], seeds=[0, 1, 2])), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_thread_count_does_not_change_results(tmp_path):
    cfg = base_config(eps_grid=[1.0, 3.0], seeds=[0, 1, 2, 3])
    serial = run_sweep(cfg, threads=1)
    parallel = run_sweep(base_config(eps_grid=[1.0, 3.0], seeds=[0, 1, 2, 3]),
                         threads=4)
    p1, p2 = tmp_path / "s.csv", tmp_path / "p.csv"
    write_records_csv(serial, p1)
    write_records_csv(parallel, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_failure_rows_are_typed_not_fatal():
    # Subspace estimation at an infeasible eps raises AssumptionViolation,
    # which must surface as a failure row, not abort the sweep.
    cfg = base_config(
        estimator={"id": "subspace_estimation", "params": {"zeta": 0.1}},
        eps_grid=[1e9],
        delta_grid=[1e-6],
        seeds=[0, 1],
    )
    records = run_sweep(cfg)
    assert len(records) == 2
    assert all(r.status == "failed" for r in records)
    assert all(r.error == "AssumptionViolation" for r in records)


def test_wrapper_and_boost_paths_run():
    cfg = base_config(
        sbm={"n": 60, "k": 2, "B": [[0.6, 0.1], [0.1, 0.6]]},
        eps_grid=[500.0],
        wrapper={"D_rule": {"mode": "multiple_of_d", "value": 1.0},
                 "eps1": 1.0, "delta1": 1e-6},
    )
    (rec,) = run_sweep(cfg)
    assert rec.status == "ok"
    assert rec.D == 36
    assert rec.budget_chain[-1]["provenance"][-1].startswith("generic reduction")

    cfg2 = base_config(
        eps_grid=[2000.0],
        wrapper={"D_rule": {"mode": "absolute", "value": 36},
                 "eps1": 1.0, "delta1": 1e-6},
        boost={"T": 3, "xi": 0.05},
    )
    (rec2,) = run_sweep(cfg2)
    assert rec2.status in ("ok", "failed")  # bot is a legal typed outcome
    if rec2.status == "ok":
        assert rec2.budget_chain[0]["eps"] == pytest.approx(3 * 2000.0)


def test_summarize_quantiles_match_sort_oracle():
    records = run_sweep(base_config(eps_grid=[1.5], seeds=list(range(9))))
    (row,) = summarize(records)
    values = sorted(r.loss_overall for r in records)
    # Sort-based linear-interpolation oracle.
    def oracle(q):
        pos = q * (len(values) - 1)
        lo, hi = int(np.floor(pos)), int(np.ceil(pos))
        frac = pos - lo
        return values[lo] * (1 - frac) + values[hi] * frac

    assert row["loss_overall_median"] == pytest.approx(oracle(0.5), abs=1e-12)
    assert row["loss_overall_q10"] == pytest.approx(oracle(0.1), abs=1e-12)
    assert row["loss_overall_q90"] == pytest.approx(oracle(0.9), abs=1e-12)
    assert row["failure_rate"] == 0.0
    assert row["trials"] == 9


def test_summarize_all_failures_marked_absent():
    cfg = base_config(
        estimator={"id": "subspace_estimation", "params": {"zeta": 0.1}},
        eps_grid=[1e9],
        delta_grid=[1e-6],
        seeds=[0, 1, 2],
    )
    (row,) = summarize(run_sweep(cfg))
    assert row["failure_rate"] == 1.0
    assert row["loss_overall_median"] is None


def test_summary_single_record_equals_it():
    records = run_sweep(base_config())
    (row,) = summarize(records)
    assert row["loss_overall_median"] == records[0].loss_overall
    assert row["loss_worst_case_median"] == records[0].loss_worst_case


def test_output_files(tmp_path):
    records = run_sweep(base_config(seeds=[0, 1]))
    write_records_csv(records, tmp_path / "records.csv")
    write_timings_csv(records, tmp_path / "timings.csv")
    write_summary_json(summarize(records), tmp_path / "summary.json")
    write_plotdata_csv(records, tmp_path / "plot.csv")
    header = (tmp_path / "records.csv").read_text().splitlines()[0]
    assert "loss_overall" in header and "runtime" not in header
    timing_header = (tmp_path / "timings.csv").read_text().splitlines()[0]
    assert "runtime_ms" in timing_header
    blob = json.loads((tmp_path / "summary.json").read_text())
    assert blob[0]["trials"] == 2
    plot_lines = (tmp_path / "plot.csv").read_text().splitlines()
    assert len(plot_lines) == 1 + 2 * 2  # header + 2 metrics x 2 trials


def test_noise_off_watermark():
    cfg = base_config(noise_off=True)
    (rec,) = run_sweep(cfg)
    assert rec.noise_off is True
    assert rec.diagnostics.get("noise_off") is True
