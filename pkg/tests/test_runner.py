import asyncio
import json

import pytest

import main
from core.errors import ConfigError
from sweeps.report import load_report
from sweeps.runner import EXPERIMENTS, run_sweep, run_sweep_async
from sweeps.sweep_config import EXPERIMENT_KINDS, SweepConfig


def hardy_config(tmp_path, **overrides):
    document = {"experiment_kind": "hardy-check", "m": [1, 2], "seed": 3,
                "options": {"samples": 6}, "output_paths": {"dir": str(tmp_path)}}
    document.update(overrides)
    return document


def test_every_kind_has_an_experiment():
    assert set(EXPERIMENTS) == set(EXPERIMENT_KINDS)


def test_unknown_kind_rejected():
    sweep_config = SweepConfig({"experiment_kind": "hardy-check"})
    sweep_config.experiment_kind = "scattering"
    with pytest.raises(ConfigError):
        run_sweep(sweep_config)


def test_single_point_resolvent_sweep():
    sweep_config = SweepConfig({"experiment_kind": "resolvent", "m": [2], "lambda_grid": {"values": [32.0]},
                                "options": {"cases": ["IV"]}})
    report = run_sweep(sweep_config)
    assert len(report.rows) == 1
    row = report.rows[0]
    assert row["value_kind"] == "sup_ratio"
    assert row["lambda"] == 32.0
    assert row["value"] is None or row["value"] > 0
    assert report.fits == {}


def test_resolvent_sweep_covers_every_case_by_default():
    experiment = EXPERIMENTS["resolvent"](SweepConfig({"experiment_kind": "resolvent"}))
    points = experiment.points()
    assert {point[0] for point in points} == {"I", "II", "III", "IV"}
    assert {point[1] for point in points} == {2, 3}


def test_hardy_check_deterministic(tmp_path):
    first = run_sweep(SweepConfig(hardy_config(tmp_path)))
    second = run_sweep(SweepConfig(hardy_config(tmp_path)), jobs=2)
    assert first.rows == second.rows
    assert len(first.rows) == 12
    assert first.flags == {"hardy_bounded_m1": True, "hardy_bounded_m2": True}
    assert all(0 < r["value"] <= 4.0 for r in first.rows)

    reseeded = run_sweep(SweepConfig(hardy_config(tmp_path, seed=4)))
    assert reseeded.rows != first.rows


def test_failed_flag_reported(tmp_path):
    report = asyncio.run(run_sweep_async(SweepConfig(hardy_config(tmp_path, tolerances={"hardy_max": 0.0}))))
    assert not report.passed
    assert report.failed_flags() == ["hardy_bounded_m1", "hardy_bounded_m2"]


def test_quadrature_lemmas_skip_m1():
    sweep_config = SweepConfig({"experiment_kind": "quadrature-lemmas", "m": [1, 2],
                                "lambda_grid": {"values": [1e3, 1e4]}})
    report = run_sweep(sweep_config)
    assert {r["m"] for r in report.rows} == {2}
    assert report.passed


def test_quadrature_lemmas_fixed_and_scaled_series():
    sweep_config = SweepConfig({"experiment_kind": "quadrature-lemmas", "m": [2],
                                "lambda_grid": {"values": [1e3, 1e4, 1e5]}})
    report = run_sweep(sweep_config)
    kinds = {r["value_kind"] for r in report.rows}
    assert kinds == {"quad_q0_eps0", "quad_weighted_eps0", "quad_q0_scaled-2", "quad_weighted_scaled-2"}
    scaled = sorted((r["lambda"], r["eps"]) for r in report.rows if r["value_kind"] == "quad_q0_scaled-2")
    for lam, eps in scaled:
        assert eps == pytest.approx(-2.0 * lam ** (-4.0 / 3))
    assert report.flags["quad_q0_scaled-2_bounded_m2"]
    assert report.flags["quad_q0_eps0_bounded_m2"]
    assert report.passed


@pytest.mark.slow
def test_ibp_check_flags():
    report = run_sweep(SweepConfig({"experiment_kind": "ibp-check", "m": [2]}))
    for preset in ("exterior", "interior", "lagrangian", "custom"):
        assert report.flags[f"ibp_order_{preset}_m2"]
    for radius in (8, 16, 32):
        assert report.flags[f"coercive_R={radius}_m2"]


def test_cli_hardy_check(tmp_path):
    argv = ["hardy-check", "--out", str(tmp_path), "--format", "csv", "--seed", "3"]
    assert asyncio.run(main.main(argv)) == 0
    lines = (tmp_path / "hardy_check.csv").read_text().splitlines()
    assert lines[0] == "m,lambda,eps,tau_re,tau_im,regime,value_kind,value,flag"
    # 50 samples for each default m in 1, 2, 3
    assert len(lines) == 151


def test_cli_byte_identical(tmp_path):
    config_path = tmp_path / "hardy.json"
    config_path.write_text(json.dumps(hardy_config(tmp_path)))
    outputs = []
    for jobs in ("1", "2"):
        argv = ["hardy-check", "-c", str(config_path), "-j", jobs]
        assert asyncio.run(main.main(argv)) == 0
        outputs.append((tmp_path / "hardy_check.json").read_bytes())
    assert outputs[0] == outputs[1]


def test_cli_failing_tolerance(tmp_path):
    config_path = tmp_path / "hardy.json"
    config_path.write_text(json.dumps(hardy_config(tmp_path, tolerances={"hardy_max": 0.0})))
    assert asyncio.run(main.main(["hardy-check", "-c", str(config_path)])) == 1
    saved = load_report(str(tmp_path / "hardy_check.json"))
    assert not saved.passed


def test_cli_kind_mismatch(tmp_path):
    config_path = tmp_path / "resolvent.json"
    config_path.write_text(json.dumps({"experiment_kind": "resolvent"}))
    assert asyncio.run(main.main(["hardy-check", "-c", str(config_path), "-o", str(tmp_path)])) == 1
    assert not (tmp_path / "hardy_check.json").exists()


def test_cli_rejects_zero_jobs(tmp_path):
    assert asyncio.run(main.main(["hardy-check", "-o", str(tmp_path), "-j", "0"])) == 1


def test_cli_report_reemits(tmp_path):
    config_path = tmp_path / "hardy.json"
    config_path.write_text(json.dumps(hardy_config(tmp_path)))
    assert asyncio.run(main.main(["hardy-check", "-c", str(config_path)])) == 0
    saved = tmp_path / "hardy_check.json"
    out = tmp_path / "again"
    assert asyncio.run(main.main(["report", "-c", str(saved), "-o", str(out), "-f", "csv"])) == 0
    lines = (out / "hardy_check.csv").read_text().splitlines()
    assert len(lines) == 13

    assert asyncio.run(main.main(["report"])) == 1
