import json

import pytest

from spoofbench.cli import main

SMALL = ["--train-size", "40", "--test-size", "20"]


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture()
def workdir(tmp_path):
    assert run("init", "--out", tmp_path, "--method", "wd", "--n-bs", "3",
               "--seed", "3", *SMALL) == 0
    return tmp_path


@pytest.fixture()
def data_dir(workdir):
    out = workdir / "data"
    assert run("generate", "--spec", workdir / "spec.json", "--out", out) == 0
    return out


@pytest.fixture()
def run_dir(workdir, data_dir):
    out = workdir / "run"
    assert run("train", data_dir, "--out", out, "--epochs", "40", "--seed", "3") == 0
    return out


def test_init_writes_loadable_files(workdir):
    config = json.loads((workdir / "config.json").read_text())
    assert [b["id"] for b in config["base_stations"]] == [1, 2, 3]
    assert config["window_size"] == 100
    spec = json.loads((workdir / "spec.json").read_text())
    assert spec["method"] == "wd" and spec["n_bs"] == 3


def test_simulate_archive_is_deterministic(workdir):
    a, b = workdir / "a.json", workdir / "b.json"
    assert run("simulate", "--config", workdir / "config.json", "--out", a) == 0
    assert run("simulate", "--config", workdir / "config.json", "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    archive = json.loads(a.read_text())
    assert archive["base_stations"] == [1, 2, 3]
    assert len(archive["scenarios"]) == 30
    first = archive["scenarios"][0]
    assert len(first["windows"]["1"]["measured_db"]) == 100


def test_simulate_seed_changes_archive(workdir):
    a, b = workdir / "a.json", workdir / "b.json"
    assert run("simulate", "--config", workdir / "config.json", "--out", a) == 0
    assert run("simulate", "--config", workdir / "config.json", "--out", b, "--seed", "99") == 0
    assert a.read_bytes() != b.read_bytes()


def test_simulate_rejects_bad_config(tmp_path):
    bad = tmp_path / "config.json"
    bad.write_text('{"start": [0, 0, 150]}')
    assert run("simulate", "--config", bad, "--out", tmp_path / "a.json") == 1
    bad.write_text('{"start": [0, 0, 150],,}')
    assert run("simulate", "--config", bad, "--out", tmp_path / "a.json") == 1


def test_generate_writes_datasets(data_dir):
    assert (data_dir / "train.csv").exists()
    assert (data_dir / "test.meta.json").exists()
    header = (data_dir / "train.csv").read_text().splitlines()[0]
    assert header == "label,f1,f2,f3"
    assert len((data_dir / "train.csv").read_text().splitlines()) == 41


def test_generate_overrides_method_and_stations(workdir):
    out = workdir / "data_box1"
    assert run("generate", "--spec", workdir / "spec.json", "--out", out,
               "--method", "box", "--n-bs", "1") == 0
    header = (out / "train.csv").read_text().splitlines()[0]
    assert header == "label,f1,f2,f3,f4,f5"


def test_train_writes_model_and_history(run_dir):
    assert (run_dir / "model.json").exists()
    doc = json.loads((run_dir / "model.json").read_text())
    assert doc["meta"]["method"] == "wd"
    assert doc["meta"]["n_bs"] == 3
    assert doc["train_config"]["max_epochs"] == 40
    history = (run_dir / "history.csv").read_text().splitlines()
    assert history[0] == "epoch,train_mse,val_mse,val_accuracy"
    assert len(history) == len(doc["history"]) + 1


def test_train_is_byte_deterministic(workdir, data_dir):
    a, b = workdir / "run_a", workdir / "run_b"
    for out in (a, b):
        assert run("train", data_dir, "--out", out, "--epochs", "25", "--seed", "5") == 0
    assert (a / "model.json").read_bytes() == (b / "model.json").read_bytes()
    assert (a / "history.csv").read_bytes() == (b / "history.csv").read_bytes()


def test_evaluate_model_report(workdir, data_dir, run_dir):
    report_path = workdir / "report.json"
    assert run("evaluate", data_dir, "--model", run_dir / "model.json",
               "--out", report_path) == 0
    report = json.loads(report_path.read_text())
    assert report["format"] == "spoofbench-report"
    assert 0.0 <= report["test_accuracy"] <= 1.0
    counts = report["confusion"]
    assert counts["tp"] + counts["fp"] + counts["fn"] + counts["tn"] == 20
    assert report["dataset_spec_hash"] == json.loads(
        (data_dir / "test.meta.json").read_text()
    )["spec_hash"]
    assert report["detector"]["kind"] == "mlp"
    assert report["wall_clock_s"] > 0


def test_evaluate_is_deterministic_up_to_wall_clock(workdir, data_dir, run_dir):
    a, b = workdir / "ra.json", workdir / "rb.json"
    for out in (a, b):
        assert run("evaluate", data_dir, "--model", run_dir / "model.json", "--out", out) == 0
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    da.pop("wall_clock_s"), db.pop("wall_clock_s")
    assert da == db


def test_evaluate_threshold_detector(workdir, data_dir):
    report_path = workdir / "thr.json"
    assert run("evaluate", data_dir, "--detector", "threshold", "--t", "1.5",
               "--out", report_path) == 0
    report = json.loads(report_path.read_text())
    assert report["detector"] == {
        "kind": "threshold", "threshold_db": 1.5, "aggregation": "mean-delta",
    }
    assert report["history"] == []
    counts = report["confusion"]
    assert sum(counts.values()) == 20


def test_evaluate_requires_exactly_one_detector(data_dir, tmp_path):
    out = tmp_path / "r.json"
    assert run("evaluate", data_dir, "--out", out) == 2
    assert run("evaluate", data_dir, "--model", "m.json",
               "--detector", "threshold", "--out", out) == 2


def test_evaluate_missing_model_fails(data_dir, tmp_path):
    assert run("evaluate", data_dir, "--model", tmp_path / "nope.json",
               "--out", tmp_path / "r.json") == 1


def test_report_merges_runs_grouped_by_scenario(workdir, data_dir, run_dir):
    out = workdir / "curves.csv"
    assert run("report", run_dir, run_dir, "--out", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "scenario,method,epoch,accuracy,mse"
    rows = [line.split(",") for line in lines[1:]]
    assert all(r[0] == "3bs" and r[1] == "wd" for r in rows)
    epochs = [int(r[2]) for r in rows]
    assert epochs == sorted(epochs)


def test_tune_writes_grid_report(workdir, data_dir):
    out = workdir / "tuned"
    assert run("tune", data_dir, "--out", out, "--lr-grid", "0.01,0.005",
               "--layers-grid", "1", "--neurons-grid", "4", "--epochs", "15",
               "--seed", "3", "--jobs", "2") == 0
    lines = (out / "grid_report.csv").read_text().splitlines()
    assert len(lines) == 3  # header + 2 configurations
    assert lines[0].startswith("method,learning_rate,hidden_layers")
    ranks = sorted(int(line.split(",")[-1]) for line in lines[1:])
    assert ranks == [1, 2]
    assert (out / "model.json").exists()
