import json

import pytest

from ovnet.cli import config_hash, main, resolve_config
from ovnet.errors import ValidationError
from ovnet.geometry import load_planes



def test_generate_is_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert main(["generate", "--set", "n=2", "--set", "train_per_cluster=20", "--seed", "5",
                     "--out", str(tmp_path / name)]) == 0
    for f in ("train.csv", "test.csv", "clusters.json", "dataset.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    manifest = json.loads((tmp_path / "a" / "run.json").read_text())
    assert manifest["seed"] == 5
    assert set(manifest["artifacts"]) >= {"train.csv", "test.csv", "dataset.png"}
    assert json.loads((tmp_path / "a" / "dataset.json").read_text())["provenance"]["seed"] == 5
    assert main(["generate", "--set", "n=2", "--set", "train_per_cluster=20", "--seed", "6",
                 "--out", str(tmp_path / "c")]) == 0
    assert (tmp_path / "a" / "train.csv").read_bytes() != (tmp_path / "c" / "train.csv").read_bytes()


def test_planes_command(tmp_path):
    assert main(["planes", "--set", "n=4", "--set", "r=2", "--out", str(tmp_path)]) == 0
    assert len(load_planes((tmp_path / "planes.json").read_text())) == 12


def test_synthesize_then_eval(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["generate", "--set", "n=3", "--set", "train_per_cluster=30", "--out", out]) == 0
    assert main(["planes", "--set", "n=3", "--out", out]) == 0
    cfg = {"command": "synthesize", "planes": "planes.json", "clusters": "clusters.json", "out": "."}
    (tmp_path / "syn.json").write_text(json.dumps(cfg))
    assert main(["synthesize", "--config", str(tmp_path / "syn.json")]) == 0
    cfg = {"command": "eval", "model": "model.json", "clusters": "clusters.json", "out": ".",
           "datasets": {"train": "train.csv", "test": "test.csv"}}
    (tmp_path / "eval.json").write_text(json.dumps(cfg))
    assert main(["eval", "--config", str(tmp_path / "eval.json")]) == 0
    acc = json.loads((tmp_path / "accuracy.json").read_text())
    assert acc["arch"] == [3, 3, 8, 4]
    for split in ("train", "test"):
        assert acc["splits"][split]["accuracy"] == 1.0
        assert acc["splits"][split]["centroid_baseline_accuracy"] == 1.0
    assert "test: 1.00000" in capsys.readouterr().out


def test_plan_and_verify(tmp_path):
    out = str(tmp_path)
    assert main(["plan", "--set", 'random_clusters={"count": 30, "dim": 6, "radius": 0.05}',
                 "--seed", "3", "--out", out]) == 0
    sep = json.loads((tmp_path / "separation.json").read_text())
    assert sep["separated"] is True
    trace = json.loads((tmp_path / "trace.json").read_text())
    assert trace["success"] and len(trace["steps"]) == 30
    assert main(["verify", "--set", f"planes={tmp_path / 'planes.json'}",
                 "--set", f"clusters={tmp_path / 'clusters.json'}", "--out", out]) == 0


def test_train_writes_report_and_figure(tmp_path):
    out = str(tmp_path)
    assert main(["train", "--set", 'dataset={"n": 2, "train_per_cluster": 20, "test_per_cluster": 5}',
                 "--set", "architecture=[2, 6, 2]", "--set", "epochs=5", "--out", out]) == 0
    report = json.loads((tmp_path / "train_report.json").read_text())
    assert report["epochs_run"] == 5
    assert (tmp_path / "losses.csv").read_text().count("\n") == 6
    assert (tmp_path / "loss.png").read_bytes()[:4] == b"\x89PNG"


def test_score_rows(tmp_path):
    rows = [{"architecture": [4, 12, 256, 8], "train_accuracy": 1.0, "test_accuracy": 0.996}]
    assert main(["score", "--set", f"rows={json.dumps(rows)}", "--set", "train_samples=25600",
                 "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "scores.csv").read_text().splitlines()
    kcr = float(lines[1].split(",")[3])
    assert kcr == pytest.approx(18.81, rel=0.01)
    assert (tmp_path / "scores.png").exists()


def test_compare(tmp_path, capsys):
    assert main(["compare", "--set", "n=3", "--set", "r=3", "--out", str(tmp_path)]) == 0
    op = json.loads((tmp_path / "opcount.json").read_text())
    assert (op["linear_ops"], op["distance_ops"]) == (84, 1536)
    assert "84 plane multiply-adds vs 1536" in capsys.readouterr().out
    assert (tmp_path / "opcount_scaling.csv").read_text().splitlines()[3].startswith("3,21,512,84,1536")


def test_exit_codes(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["synthesize", "--set", "planes=missing.json", "--set", "clusters=x", "--out", out]) == 2
    assert "missing.json" in capsys.readouterr().err
    assert main(["generate", "--set", "bogus=1", "--out", out]) == 2
    assert main(["generate", "--set", "radius=1.5", "--out", out]) == 2
    assert main(["generate", "--seed", "-1", "--out", out]) == 2
    # a valid request the planner cannot satisfy
    assert main(["plan", "--set", 'random_clusters={"count": 20, "dim": 3, "radius": 0.05}',
                 "--set", "max_planes=1", "--out", out]) == 3
    assert json.loads((tmp_path / "trace.json").read_text())["success"] is False


def test_config_resolution(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"command": "generate", "n": 4, "seed": 9}))
    cfg, seed, base, _ = resolve_config("generate", str(path), None, ["r=2"])
    assert (cfg["n"], cfg["r"], seed, base) == (4, 2, 9, tmp_path)
    cfg2, seed2, _, _ = resolve_config("generate", str(path), 1, [])
    assert seed2 == 1 and config_hash(cfg2) != config_hash(cfg)
    with pytest.raises(ValidationError):
        resolve_config("planes", str(path), None, [])
    with pytest.raises(ValidationError):
        resolve_config("generate", str(tmp_path / "nope.json"), None, [])
    assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})
