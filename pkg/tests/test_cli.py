import io
import json

import pandas as pd
import pytest

from asrscale.cli import run_command
from asrscale.fitting import PowerLawFit


def run_ok(*argv):
    code, out, err = run_command(list(argv))
    assert code == 0, err
    return out


def test_fit_fixture():
    document = json.loads(run_ok("fit", "--input", "fixture:table3:S5-preliminary", "--format", "json"))
    assert document["alpha"] == pytest.approx(-0.181, abs=1e-3)
    assert document["n_points"] == 4
    assert document["method"] == "loglog-ols"


def test_fit_by_encoder(tmp_path):
    out = tmp_path / "fits.json"
    run_ok("fit", "--input", "fixture:table4", "--by", "encoder", "--out", str(out))
    document = json.loads(out.read_text())
    assert list(document) == ["whisper-medium-ft", "whisper-large-v2-ft"]
    assert document["whisper-medium-ft"]["alpha"] == pytest.approx(-0.18, abs=0.01)


def test_fit_table_lists_every_group():
    out = run_ok("fit", "--input", "fixture:table3")
    for label in ("S1", "S2", "S3", "S4", "S5-preliminary", "S6"):
        assert label in out


@pytest.mark.parametrize("extra", [[], ["--saturating"]])
def test_fit_constant_cer_is_degenerate(tmp_path, extra):
    path = tmp_path / "flat.csv"
    path.write_text("run_id,strategy_id,encoder_tag,data_hours,test_set,cer,total_flops\n"
                    "r1,S1,e,2000,TEST-NET,5,100\n"
                    "r2,S1,e,5000,TEST-NET,5,200\n"
                    "r3,S1,e,8000,TEST-NET,5,300\n")
    code, out, err = run_command(["fit", "--input", str(path)] + extra)
    assert code == 1
    assert "DegenerateFitError" in err
    assert out == ""


def test_predict():
    assert run_ok("predict", "--alpha", "-0.18", "--beta", "28.24", "--budget", "948.26") == "8.22\n"


def test_predict_json():
    (row,) = json.loads(run_ok("predict", "--alpha", "-0.18", "--beta", "28.24", "--budget", "948.26",
                               "--format", "json"))
    assert row["predicted_cer"] == pytest.approx(8.2228, abs=1e-4)


def test_predict_invalid_budget():
    code, _, err = run_command(["predict", "--alpha", "-0.18", "--beta", "28.24", "--budget", "0"])
    assert code == 1
    assert "FitError" in err


def test_plan(tmp_path):
    path = tmp_path / "fit.json"
    path.write_text(PowerLawFit(alpha=-0.18, beta=28.24).to_json())
    assert float(run_ok("plan", "--target-cer", "8.23", "--fit", str(path))) == pytest.approx(943.6, abs=0.5)


def test_plan_multi_fit_document(tmp_path):
    path = tmp_path / "fits.json"
    run_ok("fit", "--input", "fixture:table4", "--by", "encoder", "--out", str(path))
    code, _, err = run_command(["plan", "--target-cer", "8.0", "--fit", str(path)])
    assert code == 2
    assert "--label" in err
    assert float(run_ok("plan", "--target-cer", "8.0", "--fit", str(path), "--label", "whisper-large-v2-ft")) > 0


def test_plan_unattainable(tmp_path):
    path = tmp_path / "fit.json"
    path.write_text(PowerLawFit(alpha=-0.5, beta=5.0, l_infinity=5.0).to_json())
    code, out, err = run_command(["plan", "--target-cer", "4", "--fit", str(path)])
    assert code == 1
    assert out == ""
    assert "UnattainableTargetError" in err


def test_unknown_command():
    code, _, err = run_command(["train"])
    assert code == 2
    assert "usage" in err


def test_missing_required_option():
    code, _, err = run_command(["predict", "--alpha", "-0.18"])
    assert code == 2
    assert "--beta" in err


def test_help():
    code, out, _ = run_command(["--help"])
    assert code == 0
    assert "estimate" in out


def test_unknown_fixture_table():
    code, _, err = run_command(["fixtures", "9"])
    assert code == 1
    assert "ConfigurationError" in err


def test_fixtures_table():
    out = run_ok("fixtures", "1")
    assert "table1-S5" in out
    assert "1637.20" in out
    # (12.37 + 8.48) / 2 = 10.425 rounds half up
    assert "10.43" in out


def test_ingest_fixtures_csv(tmp_path):
    csv_path = tmp_path / "table3.csv"
    csv_path.write_text(run_ok("fixtures", "3", "--format", "csv"))
    store = tmp_path / "runs.jsonl"

    assert run_ok("ingest", str(csv_path), "--store", str(store)).startswith("ingested 24 run(s)")
    code, _, err = run_command(["ingest", str(csv_path), "--store", str(store)])
    assert code == 1
    assert "StoreConflictError" in err

    fit = json.loads(run_ok("fit", "--input", "store", "--store", str(store), "--by", "encoder", "--format", "json"))
    assert list(fit) == ["whisper-medium", "whisper-medium-ft"]


def test_ingest_bad_csv(tmp_path):
    path = tmp_path / "runs.csv"
    path.write_text("run_id,strategy_id,encoder_tag,data_hours,test_set,cer,total_flops\n"
                    "r1,S1,e,2000,TEST-NET,19.33,160.75\n"
                    "r2,S1,e,2000,TEST-NET,abc,160.75\n")
    code, _, err = run_command(["ingest", str(path), "--store", str(tmp_path / "runs.jsonl")])
    assert code == 2
    assert "line 3" in err
    assert not (tmp_path / "runs.jsonl").exists()


def test_compare_csv():
    out = run_ok("compare", "--baseline", "S3", "--input", "fixture:table1", "--input", "fixture:table2",
                 "--format", "csv")
    frame = pd.read_csv(io.StringIO(out))
    row = frame[frame.strategy_id == "S5-preliminary"].iloc[0]
    assert row.cerr * 100 == pytest.approx(21.1, abs=0.1)
    assert row.flops_ratio * 100 == pytest.approx(49.9, abs=0.1)


def test_compare_table_rounds_percentages():
    out = run_ok("compare", "--baseline", "S3", "--input", "fixture:table1")
    assert "100.0%" in out
    assert "0.0%" in out


def test_compare_table_rounds_ratio_half_up():
    # 948.26 / 1898.16 = 0.49957
    out = run_ok("compare", "--baseline", "S3", "--input", "fixture:table1", "--input", "fixture:table2")
    (line,) = [l for l in out.splitlines() if "S5-preliminary" in l]
    assert "50.0%" in line
    assert "49.9%" not in line


def test_compare_per_test_set():
    rows = json.loads(run_ok("compare", "--baseline", "S3", "--candidate", "S5", "--input", "fixture:table1",
                             "--format", "json"))
    assert [r["set_name"] for r in rows] == ["TEST-MEETING", "TEST-NET"]
    assert rows[1]["cerr"] == pytest.approx(0.17335, abs=1e-4)


def test_duplicate_inputs():
    code, _, err = run_command(["pareto", "--input", "fixture:table1", "--input", "fixture:table1"])
    assert code == 2
    assert "twice" in err


def test_pareto_json():
    rows = json.loads(run_ok("pareto", "--input", "fixture:table1", "--format", "json"))
    assert [r["strategy_id"] for r in rows] == ["S1", "S4", "S5"]


def test_pareto_csv():
    frame = pd.read_csv(io.StringIO(run_ok("pareto", "--input", "fixture:table1", "--format", "csv")))
    assert list(frame.strategy_id) == ["S1", "S4", "S5"]
    assert list(frame.total_flops) == [803.77, 1162.58, 1637.20]


def test_decompose():
    rows = {r["strategy_id"]: r for r in json.loads(run_ok("decompose", "--input", "fixture:table3",
                                                           "--format", "json"))}
    assert rows["S4"]["intercept"] == pytest.approx(358.8, abs=1.0)
    assert rows["S1"]["slope"] == pytest.approx(80.38, abs=0.01)


def test_estimate():
    rows = json.loads(run_ok("estimate", "--format", "json"))
    totals = {r["strategy_id"]: r["total"] for r in rows if r["stage"] == "all"}
    assert {"S1", "S2", "S3", "S4", "S5", "S6", "S5-preliminary"} <= set(totals)
    assert all(t > 0 for t in totals.values())
    for strategy_id, total in totals.items():
        stages = [r["total"] for r in rows if r["strategy_id"] == strategy_id and r["stage"] != "all"]
        assert sum(stages) == pytest.approx(total)


def test_estimate_scales_with_hours():
    (small,) = [r["total"] for r in json.loads(run_ok("estimate", "--strategy", "S1", "--hours", "1000",
                                                      "--format", "json")) if r["stage"] == "all"]
    (large,) = [r["total"] for r in json.loads(run_ok("estimate", "--strategy", "S1", "--hours", "2000",
                                                      "--format", "json")) if r["stage"] == "all"]
    assert large == pytest.approx(2 * small, rel=1e-3)


def test_estimate_config_with_own_module_names(tmp_path):
    config = tmp_path / "arch.json"
    config.write_text(json.dumps({
        "modules": [
            {"name": "enc", "role": "speech-encoder", "param_count": 10},
            {"name": "proj", "role": "projection", "param_count": 5},
            {"name": "lm", "role": "language-model", "param_count": 100,
             "adapter": {"rank": 1, "alpha": 1, "layer_count": 1, "target_dims": [[2, 2]]}},
        ],
        "strategies": [{"id": "A", "stages": [{"kind": "alignment", "dataset": {"hours": 1}}]}],
    }))
    rows = json.loads(run_ok("estimate", "--config", str(config), "--format", "json"))
    (total,) = [r["total"] for r in rows if r["stage"] == "all"]
    assert total * 1e15 == pytest.approx(28_162_800, rel=1e-9)


def test_strategies():
    rows = json.loads(run_ok("strategies", "--format", "json"))
    assert all(r["valid"] for r in rows)
    assert "S5-preliminary" in [r["strategy_id"] for r in rows]


@pytest.fixture
def curve_csv(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("cumulative_flops,avg_cer,stage_kind\n"
                    "1,20,alignment\n2,12,alignment\n3,10,alignment\n4,9.8,alignment\n5,9.79,alignment\n")
    return path


def test_converge(curve_csv):
    argv = ["converge", "--curve", str(curve_csv), "--window", "2", "--preliminary-threshold", "0.05",
            "--full-threshold", "0.01"]
    assert run_ok(*argv, "--level", "full") == "4\n"
    assert run_ok(*argv) == "3\n"


def test_converge_never(curve_csv):
    assert run_ok("converge", "--curve", str(curve_csv), "--window", "2", "--preliminary-threshold", "0.5",
                  "--full-threshold", "0.0001", "--level", "full") == "not converged\n"


def test_converge_window_too_long(curve_csv):
    code, _, _ = run_command(["converge", "--curve", str(curve_csv), "--window", "9"])
    assert code == 1


def test_chart(tmp_path):
    out = tmp_path / "scaling.svg"
    assert run_ok("chart", "--input", "fixture:table4", "--by", "encoder", "--axes", "loglog", "--fit",
                  "--out", str(out)) == f"wrote {out}\n"
    assert out.read_text().lstrip().startswith("<?xml")


def test_chart_curve(tmp_path, curve_csv):
    out = tmp_path / "curve.svg"
    run_ok("chart", "--curve", str(curve_csv), "--out", str(out))
    assert 'id="stage-0"' in out.read_text()


def test_chart_empty_input(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    code, _, err = run_command(["chart", "--input", str(empty), "--out", str(tmp_path / "x.svg")])
    assert code == 2
    assert "no series" in err
    assert not (tmp_path / "x.svg").exists()


def test_chart_needs_input(tmp_path):
    code, _, _ = run_command(["chart", "--out", str(tmp_path / "x.svg")])
    assert code == 2


def test_cer(tmp_path):
    ref, hyp = tmp_path / "ref.tsv", tmp_path / "hyp.tsv"
    ref.write_text("u1\t你好世界\nu2\t今天天气\n", encoding="utf-8")
    hyp.write_text("u1\t你好世间\nu2\t今天天气\n", encoding="utf-8")
    (row,) = json.loads(run_ok("cer", "--ref", str(ref), "--hyp", str(hyp), "--format", "json"))
    assert row["cer"] == pytest.approx(12.5)
    assert (row["edits"], row["reference_chars"], row["utterances"]) == (1, 8, 2)


def test_cer_missing_file(tmp_path):
    code, _, _ = run_command(["cer", "--ref", str(tmp_path / "nope.tsv"), "--hyp", str(tmp_path / "nope.tsv")])
    assert code == 2
