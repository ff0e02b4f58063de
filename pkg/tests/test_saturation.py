import pytest

from core.errors import ParameterError
from lab.saturation import saturation_experiment
from sweeps.evolution_experiments import SaturationSweep
from sweeps.runner import run_sweep
from sweeps.sweep_config import SweepConfig


def test_single_saturation_run():
    result = saturation_experiment(64.0, 2)
    assert result.T == pytest.approx(1.0)
    assert result.energy_drift <= 1e-8
    assert result.lhs > 0 and result.rhs > 0
    assert result.ratio == pytest.approx(result.lhs / result.rhs)
    assert result.b2t_prediction > 0
    assert result.as_dict()["lambda"] == 64.0


def test_low_frequency_rejected():
    with pytest.raises(ParameterError):
        saturation_experiment(32.0, 2)


def test_saturation_report_checks_growth_gap_and_convergence():
    experiment = SaturationSweep(SweepConfig({"experiment_kind": "saturation", "m": [2],
                                              "lambda_grid": {"values": [64.0]}}))
    assert (2, None) in experiment.points()
    rows = experiment.run_point((2, None))
    kinds = {row["value_kind"]: row["value"] for row in rows}
    assert kinds["growth_gap_min"] == pytest.approx(0.25, abs=1e-12)
    assert kinds["convergence_order"] == pytest.approx(2.0, abs=0.2)
    _, flags = experiment.evaluate(rows)
    assert flags["growth_gap_m2"]
    assert flags["convergence_order_m2"]


@pytest.mark.slow
def test_saturation_sweep():
    report = run_sweep(SweepConfig({"experiment_kind": "saturation", "m": [2]}))
    assert report.flags["saturation_slope_m2"]
    assert report.flags["saturation_floor_m2"]
    assert report.flags["energy_conserved_m2"]
    assert report.flags["growth_gap_m2"]
    assert report.flags["convergence_order_m2"]
    assert report.passed


@pytest.mark.slow
def test_quasimode_scan():
    report = run_sweep(SweepConfig({"experiment_kind": "quasimode", "m": [2, 3]}))
    assert report.flags["residual_slope_m2"]
    assert report.flags["residual_slope_m3"]
    assert report.flags["growth_gap_m2"]
    assert report.passed


@pytest.mark.slow
@pytest.mark.parametrize("m", [2, 3])
def test_case_iv_slope(m):
    report = run_sweep(SweepConfig({"experiment_kind": "resolvent", "m": [m], "options": {"cases": ["IV"]}}),
                       jobs=4)
    fit = report.fits[f"case_iv_m{m}"]
    assert fit["slope"] == pytest.approx((m - 1.0) / (m + 1), abs=0.07)


@pytest.mark.slow
def test_uniform_cases():
    report = run_sweep(SweepConfig({"experiment_kind": "resolvent", "m": [2],
                                    "lambda_grid": {"values": [32.0]},
                                    "options": {"cases": ["I", "II", "III"]}}), jobs=4)
    for case in ("i", "ii", "iii"):
        assert report.flags[f"case_{case}_uniform_m2"]
