"""End-to-end runs of the ``bevnav`` command line on the tiny profile."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from bevnav.cli import run
from bevnav.common.config import dump_run_config, load_run_config


@pytest.fixture
def tiny_config_file(tiny_cfg, tmp_path) -> Path:
    return dump_run_config(tiny_cfg, tmp_path / "tiny.json")


def _json_lines(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.startswith("{")]


class TestInspect:
    def test_single_point_cloud(self, tmp_path, capsys):
        cloud = tmp_path / "one.xyz"
        cloud.write_text("# x y z\n0.0 2.0 0.5\n", encoding="utf-8")
        assert run(["inspect", str(cloud), "--out", str(tmp_path / "out")]) == 0
        summary = _json_lines(capsys.readouterr().out)[0]
        assert summary["points"] == 1
        assert summary["active_cells"] == 1
        with Image.open(summary["pgm"]) as img:
            pixels = np.asarray(img)
        assert np.count_nonzero(pixels) == 1

    def test_malformed_line_reports_line_number(self, tmp_path, capsys):
        cloud = tmp_path / "bad.xyz"
        cloud.write_text("0 1 0\n0 one 0\n", encoding="utf-8")
        assert run(["inspect", str(cloud), "--out", str(tmp_path / "out")]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_empty_file_is_an_error(self, tmp_path, capsys):
        cloud = tmp_path / "empty.xyz"
        cloud.write_text("", encoding="utf-8")
        assert run(["inspect", str(cloud), "--out", str(tmp_path / "out")]) == 2
        assert "no points" in capsys.readouterr().err


def test_gradcheck_passes(capsys):
    assert run(["gradcheck"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.strip().endswith("8/8 blocks passed")


def test_gradcheck_unknown_block(capsys):
    assert run(["gradcheck", "--block", "transformer"]) == 2
    assert "unknown block" in capsys.readouterr().err


def test_missing_checkpoint_fails(tmp_path, capsys):
    code = run(["eval", "--checkpoint", str(tmp_path / "nope.ckpt"), "--out", str(tmp_path / "eval")])
    assert code != 0
    assert "ERROR" in capsys.readouterr().err


def test_invalid_config_names_the_field(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("train:\n  window: -1\n", encoding="utf-8")
    assert run(["train", "--config", str(path), "--out", str(tmp_path / "run")]) == 2
    assert "train.window" in capsys.readouterr().err


def test_train_then_eval(tiny_config_file, tmp_path, capsys):
    run_dir = tmp_path / "run"
    assert run(["train", "--config", str(tiny_config_file), "--steps", "30", "--seed", "3", "--out", str(run_dir)]) == 0
    checkpoint = Path(capsys.readouterr().out.strip().splitlines()[-1])
    assert checkpoint == run_dir / "final.ckpt"
    lines = (run_dir / "train.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0].endswith("seed=3")
    steps = [int(row["step"]) for row in csv.DictReader(lines[1:])]
    assert steps == sorted(steps)

    eval_dir = tmp_path / "eval"
    code = run(
        [
            "eval", "--checkpoint", str(checkpoint), "--scenario", "lobby", "--peds", "0,2",
            "--episodes", "2", "--out", str(eval_dir),
        ]
    )
    assert code == 0
    rows = _json_lines(capsys.readouterr().out)
    assert [(r["scenario"], r["peds"], r["N"]) for r in rows] == [("lobby", 0, 2), ("lobby", 2, 2)]
    with open(eval_dir / "metrics.csv", newline="", encoding="utf-8") as f:
        metrics = list(csv.DictReader(f))
    trained = load_run_config(run_dir / "config.json")
    assert {m["config_hash"] for m in metrics} == {trained.config_hash()}
    assert {m["seed"] for m in metrics} == {"3"}


def test_baseline_flags(tiny_config_file, tmp_path, capsys):
    run_dir = tmp_path / "sac_b"
    code = run(
        ["train", "--config", str(tiny_config_file), "--steps", "25", "--no-scl", "--no-tcl", "--out", str(run_dir)]
    )
    assert code == 0
    saved = load_run_config(run_dir / "config.json")
    assert not saved.train.enable_scl
    assert not saved.train.tcl_active
    lines = (run_dir / "train.csv").read_text(encoding="utf-8").splitlines()[1:]
    assert all(row["L_sc"] == "" and row["L_tc"] == "" for row in csv.DictReader(lines))


@pytest.mark.slow
def test_sweep_k_report(tiny_config_file, tmp_path, capsys):
    out = tmp_path / "sweep"
    code = run(
        ["sweep-k", "--config", str(tiny_config_file), "--k", "0,2", "--seeds", "0,1", "--steps", "30",
         "--episodes", "2", "--out", str(out)]
    )
    assert code == 0
    with open(out / "sweep_k.csv", newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    per_run = [(r["K"], r["seed"]) for r in rows if r["seed"] != "mean"]
    assert per_run == [("0", "0"), ("0", "1"), ("2", "0"), ("2", "1")]
    assert [r["K"] for r in rows if r["seed"] == "mean"] == ["0", "2"]
    # paired seeds: the same evaluation episodes for every K
    eps = {}
    for k in (0, 2):
        with open(out / f"K{k}_seed0" / "eval" / "empty" / "episodes.csv", newline="", encoding="utf-8") as f:
            eps[k] = [(r["seed"], r["optimal_length"]) for r in csv.DictReader(f)]
    assert eps[0] == eps[2]


@pytest.mark.slow
def test_ablation_report(tiny_config_file, tmp_path, capsys):
    out = tmp_path / "ablate"
    code = run(
        ["ablate", "--config", str(tiny_config_file), "--steps", "25", "--episodes", "2",
         "--eval-scenarios", "empty,lobby", "--out", str(out)]
    )
    assert code == 0
    with open(out / "ablation.csv", newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert [(r["variant"], r["scenario"]) for r in rows] == [
        (v, s) for v in ("sac_b", "curl_b", "full") for s in ("empty", "lobby")
    ]
