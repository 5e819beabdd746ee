"""End-to-end CLI behavior: reports, formats, exit codes."""

import csv
import io
import json

import jsonschema
import numpy as np
import pytest
from click.testing import CliRunner

from prosparsity import (
    SpikeMatrix,
    WeightMatrix,
    load_manifest,
    save_spike_matrix,
    save_weight_matrix,
)
from prosparsity.cli import main
from prosparsity.schemas import SCHEMAS

from conftest import CANONICAL_ROWS


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def canonical_files(tmp_path):
    spikes = SpikeMatrix.from_rows(CANONICAL_ROWS)
    weights = WeightMatrix.from_array(np.array([[1], [2], [3], [4]], dtype=np.int8))
    spike_path = tmp_path / "spikes.prsp"
    weight_path = tmp_path / "weights.prsp"
    save_spike_matrix(spike_path, spikes)
    save_weight_matrix(weight_path, weights)
    return spike_path, weight_path


def run_json(runner, args, expect_exit=0):
    result = runner.invoke(main, args + ["--format", "json"])
    assert result.exit_code == expect_exit, result.output
    report = json.loads(result.output)
    jsonschema.validate(report, SCHEMAS[report["command"]])
    return report


# -- verify -----------------------------------------------------------------


def test_verify_canonical_passes(runner, canonical_files):
    spikes, weights = canonical_files
    args = [
        "verify", "--spikes", str(spikes), "--weights", str(weights),
        "--tile-m", "6", "--tile-k", "4",
    ]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    assert "PASS" in result.output
    report = run_json(runner, args)
    assert report["all_passed"] is True
    assert report["layers"][0]["max_relative_error"] == 0
    assert report["layers"][0]["accumulations"] == {"prosparse": 6, "bitsparse": 14}


def test_verify_fault_injection_fails_with_cell(runner, canonical_files):
    spikes, weights = canonical_files
    args = [
        "verify", "--spikes", str(spikes), "--weights", str(weights),
        "--tile-m", "6", "--tile-k", "4", "--inject-fault",
    ]
    result = runner.invoke(main, args)
    assert result.exit_code == 1
    assert "FAIL" in result.output
    assert "first mismatch" in result.output
    report = run_json(runner, args, expect_exit=1)
    assert report["all_passed"] is False
    assert report["layers"][0]["first_mismatch"]["row"] == 0


def test_verify_f32_mode_within_tolerance(runner, tmp_path):
    rng = np.random.default_rng(55)
    spikes = SpikeMatrix.from_dense(rng.random((40, 24)) < 0.4)
    weights = WeightMatrix.from_array(rng.standard_normal((24, 16)).astype(np.float32))
    sp, wp = tmp_path / "s.prsp", tmp_path / "w.prsp"
    save_spike_matrix(sp, spikes)
    save_weight_matrix(wp, weights)
    result = runner.invoke(
        main,
        ["verify", "--spikes", str(sp), "--weights", str(wp), "--mode", "f32",
         "--tile-m", "16", "--tile-k", "8"],
    )
    assert result.exit_code == 0, result.output
    assert "PASS" in result.output


def test_verify_requires_weights(runner, canonical_files):
    spikes, _ = canonical_files
    result = runner.invoke(main, ["verify", "--spikes", str(spikes)])
    assert result.exit_code == 2


def test_verify_rejects_float_weights_in_int8_mode(runner, tmp_path, canonical_files):
    spikes, _ = canonical_files
    wp = tmp_path / "wf.prsp"
    save_weight_matrix(wp, WeightMatrix.from_array(np.zeros((4, 2), dtype=np.float32)))
    result = runner.invoke(main, ["verify", "--spikes", str(spikes), "--weights", str(wp)])
    assert result.exit_code == 2


def test_missing_file_is_io_error(runner):
    result = runner.invoke(main, ["verify", "--spikes", "/does/not/exist.prsp"])
    assert result.exit_code == 3


def test_corrupt_file_is_format_error(runner, tmp_path):
    bad = tmp_path / "bad.prsp"
    bad.write_bytes(b"XXXX" + bytes(12))
    result = runner.invoke(main, ["density", "--spikes", str(bad)])
    assert result.exit_code == 3
    assert "format error" in result.output


def test_both_inputs_rejected(runner, canonical_files, tmp_path):
    spikes, _ = canonical_files
    result = runner.invoke(
        main, ["density", "--spikes", str(spikes), "--manifest", str(tmp_path / "m.json")]
    )
    assert result.exit_code == 2
    result = runner.invoke(main, ["density"])
    assert result.exit_code == 2


def test_csv_not_available_for_verify(runner, canonical_files):
    spikes, weights = canonical_files
    result = runner.invoke(
        main, ["verify", "--spikes", str(spikes), "--weights", str(weights), "--format", "csv"]
    )
    assert result.exit_code == 2


# -- density ----------------------------------------------------------------


def test_density_canonical(runner, canonical_files):
    spikes, _ = canonical_files
    args = ["density", "--spikes", str(spikes), "--tile-m", "6", "--tile-k", "4"]
    report = run_json(runner, args)
    agg = report["aggregate"]
    assert agg["bit_density"] == pytest.approx(14 / 24)
    assert agg["pro_density"] == pytest.approx(0.25)
    assert agg["reduction"] == pytest.approx(14 / 6)
    assert agg["em_fraction"] == pytest.approx(1 / 6)
    assert agg["pm_fraction"] == pytest.approx(3 / 6)
    text = runner.invoke(main, args).output
    assert "bit 0.5833" in text and "pro 0.2500" in text


def test_density_m1_tiles_have_no_reuse(runner, canonical_files):
    spikes, _ = canonical_files
    report = run_json(
        runner, ["density", "--spikes", str(spikes), "--tile-m", "1", "--tile-k", "4"]
    )
    agg = report["aggregate"]
    assert agg["pro_density"] == agg["bit_density"]
    assert agg["reduction"] == pytest.approx(1.0)


def test_density_csv(runner, canonical_files):
    spikes, _ = canonical_files
    result = runner.invoke(
        main,
        ["density", "--spikes", str(spikes), "--tile-m", "6", "--tile-k", "4",
         "--format", "csv"],
    )
    assert result.exit_code == 0
    rows = list(csv.DictReader(io.StringIO(result.output)))
    assert rows[-1]["name"] == "aggregate"
    assert float(rows[0]["pro_density"]) == pytest.approx(0.25)


# -- simulate ---------------------------------------------------------------


def test_simulate_canonical_cycles(runner, canonical_files):
    spikes, weights = canonical_files
    args = [
        "simulate", "--spikes", str(spikes), "--weights", str(weights),
        "--tile-m", "6", "--tile-k", "4",
    ]
    report = run_json(runner, args)
    cycles = report["layers"][0]["cycles"]
    assert cycles == {
        "dense": 28,
        "bitsparse": 18,
        "prosparse_compute": 11,
        "prosparse_total": 21,
    }
    speed = report["layers"][0]["speedup"]
    assert speed["vs_dense"] == pytest.approx(28 / 11)
    assert speed["full_vs_bitsparse"] == pytest.approx(18 / 21)
    # text and JSON carry the same numbers
    text = runner.invoke(main, args).output
    assert "dense 28" in text and "bitsparse 18" in text and "prosparse 11 (total 21)" in text


def test_simulate_without_weights_defaults_width(runner, canonical_files):
    spikes, _ = canonical_files
    report = run_json(
        runner, ["simulate", "--spikes", str(spikes), "--tile-m", "6", "--tile-k", "4"]
    )
    assert report["layers"][0]["cycles"]["dense"] == 28  # N=128 still one pass


# -- dse --------------------------------------------------------------------


@pytest.fixture
def clustered_dir(runner, tmp_path):
    out = tmp_path / "gen"
    result = runner.invoke(
        main,
        ["gen", "--kind", "clustered", "--m", "128", "--k", "32", "--density", "0.3",
         "--base-patterns", "6", "--flip-prob", "0.01", "--seed", "77",
         "--out-dir", str(out)],
    )
    assert result.exit_code == 0, result.output
    return out


def test_dse_csv_columns_and_monotonicity(runner, clustered_dir):
    result = runner.invoke(
        main,
        ["dse", "--manifest", str(clustered_dir / "manifest.json"),
         "--m-values", "16,32,64,128", "--k-values", "8,16", "--format", "csv"],
    )
    assert result.exit_code == 0, result.output
    rows = list(csv.DictReader(io.StringIO(result.output)))
    assert list(rows[0]) == [
        "m", "k", "bit_density", "pro_density",
        "prosparsity_cycles", "bitsparse_cycles", "relative_latency",
    ]
    assert len(rows) == 8
    for k in ("8", "16"):
        dens = [float(r["pro_density"]) for r in rows if r["k"] == k]
        assert all(b <= a + 1e-12 for a, b in zip(dens, dens[1:]))


def test_dse_json_marks_best(runner, clustered_dir):
    report = run_json(
        runner,
        ["dse", "--manifest", str(clustered_dir / "manifest.json"),
         "--m-values", "32,64", "--k-values", "16"],
    )
    best_points = [p for p in report["points"] if p["best"]]
    assert len(best_points) == 1
    assert report["best"]["m"] == best_points[0]["m"]
    assert report["monotonicity_checked"] is True


def test_dse_single_point(runner, clustered_dir):
    report = run_json(
        runner,
        ["dse", "--manifest", str(clustered_dir / "manifest.json"),
         "--m-values", "64", "--k-values", "16"],
    )
    assert len(report["points"]) == 1


def test_dse_rejects_non_power_of_two(runner, clustered_dir):
    result = runner.invoke(
        main,
        ["dse", "--manifest", str(clustered_dir / "manifest.json"), "--m-values", "48"],
    )
    assert result.exit_code == 2


# -- oracle -----------------------------------------------------------------


def test_oracle_canonical(runner, canonical_files):
    spikes, _ = canonical_files
    args = ["oracle", "--spikes", str(spikes), "--tile-m", "6", "--tile-k", "4"]
    report = run_json(runner, args)
    layer = report["layers"][0]
    assert report["all_agree"] is True
    assert layer["one_prefix"]["pro_density"] == pytest.approx(0.25)
    assert layer["two_prefix"]["pro_density"] <= layer["one_prefix"]["pro_density"]
    assert layer["forest"] == {"trees": 2, "max_depth": 2}
    result = runner.invoke(main, args)
    assert result.exit_code == 0
    assert "PASS" in result.output


def test_oracle_random_batch(runner, tmp_path):
    rng = np.random.default_rng(60)
    sp = tmp_path / "r.prsp"
    save_spike_matrix(sp, SpikeMatrix.from_dense(rng.random((96, 40)) < 0.35))
    result = runner.invoke(
        main, ["oracle", "--spikes", str(sp), "--tile-m", "32", "--tile-k", "8"]
    )
    assert result.exit_code == 0, result.output
    assert "all layers agree" in result.output


# -- cost -------------------------------------------------------------------


def test_cost_defaults(runner):
    report = run_json(runner, ["cost"])
    assert report["ratio"] == pytest.approx(3.00375)
    assert report["breakeven_delta_s"] == pytest.approx(0.044444, rel=1e-4)
    assert report["tcam_ops"] == 1_048_576
    text = runner.invoke(main, ["cost"]).output
    assert "3.0038" in text and "0.0444" in text


def test_cost_at_breakeven(runner):
    report = run_json(runner, ["cost", "--delta-s", str(256 / (45 * 128))])
    assert report["ratio"] == pytest.approx(1.0)


# -- gen --------------------------------------------------------------------


def test_gen_round_trip_and_determinism(runner, tmp_path):
    args = [
        "gen", "--kind", "bernoulli", "--m", "32", "--k", "16", "--density", "0.3",
        "--seed", "5", "--weights-cols", "8",
    ]
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert runner.invoke(main, args + ["--out-dir", str(out_a)]).exit_code == 0
    assert runner.invoke(main, args + ["--out-dir", str(out_b)]).exit_code == 0
    assert (out_a / "layer0_spikes.prsp").read_bytes() == (
        out_b / "layer0_spikes.prsp"
    ).read_bytes()
    traces = load_manifest(out_a / "manifest.json")
    assert traces[0].M == 32 and traces[0].K == 16 and traces[0].N == 8
    assert traces[0].weights is not None


def test_gen_invalid_density_writes_nothing(runner, tmp_path):
    out = tmp_path / "bad"
    result = runner.invoke(
        main,
        ["gen", "--kind", "bernoulli", "--m", "8", "--k", "8", "--density", "1.5",
         "--out-dir", str(out)],
    )
    assert result.exit_code == 2
    assert not out.exists()


def test_gen_json_schema(runner, tmp_path):
    report = run_json(
        runner,
        ["gen", "--kind", "clustered", "--m", "16", "--k", "8", "--density", "0.5",
         "--out-dir", str(tmp_path / "g")],
    )
    assert report["spec"]["kind"] == "clustered"
