from __future__ import annotations

import math

import pytest

from bevnav.common.config import deep_merge, dump_run_config, load_run_config
from bevnav.common.errors import ConfigError
from bevnav.common.settings import Settings
from bevnav.common.utils import make_config_hash, wrap_angle


def test_profiles():
    desk = load_run_config(None, "desk")
    paper = load_run_config(None, "paper")
    assert desk.pillars.grid_shape == (64, 64)
    assert paper.pillars.grid_shape == (128, 128)
    assert desk.sim.cloud_points == 256
    assert paper.sim.cloud_points == 1024
    assert paper.world_spec().half_extent == 10.0
    assert desk.arena_diagonal() == pytest.approx(10.0 * math.sqrt(2.0))


def test_unknown_profile():
    with pytest.raises(ConfigError, match="unknown profile"):
        load_run_config(None, "laptop")


def test_file_then_overrides(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("seed: 4\ntrain:\n  window: 1\n  batch_size: 8\n", encoding="utf-8")
    cfg = load_run_config(path, None, {"train": {"window": 2}})
    assert cfg.seed == 4
    assert cfg.train.window == 2
    assert cfg.train.batch_size == 8
    assert cfg.train.gamma == 0.99


@pytest.mark.parametrize(
    ("text", "match"),
    [
        ("- 1\n- 2\n", "top level must be a mapping"),
        ("train: {windoww: 3}\n", "train.windoww"),
        ("scenario: maze\n", "unknown scenario"),
        ("train: [1\n", "run.yaml"),
    ],
)
def test_bad_files(tmp_path, text, match):
    path = tmp_path / "run.yaml"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError, match=match):
        load_run_config(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_run_config(tmp_path / "nope.json")


def test_hash_ignores_run_identity(tiny_cfg):
    same = tiny_cfg.model_copy(update={"seed": 9, "steps": 5, "out_dir": "elsewhere"})
    assert same.config_hash() == tiny_cfg.config_hash()
    other = tiny_cfg.model_copy(update={"scenario": "lobby"})
    assert other.config_hash() != tiny_cfg.config_hash()
    assert len(tiny_cfg.config_hash()) == 16


def test_dump_loads_back(tiny_cfg, tmp_path):
    path = dump_run_config(tiny_cfg, tmp_path / "nested" / "config.json")
    assert load_run_config(path) == tiny_cfg


def test_deep_merge_copies():
    base = {"train": {"window": 3, "gamma": 0.99}, "seed": 0}
    merged = deep_merge(base, {"train": {"window": 1}})
    assert merged == {"train": {"window": 1, "gamma": 0.99}, "seed": 0}
    merged["train"]["gamma"] = 0.5
    assert base["train"]["gamma"] == 0.99


def test_config_hash_is_order_free():
    assert make_config_hash({"a": 1, "b": 2}) == make_config_hash({"b": 2, "a": 1})


@pytest.mark.parametrize(
    ("theta", "expected"),
    [(0.0, 0.0), (math.pi, math.pi), (-math.pi, math.pi), (3 * math.pi / 2, -math.pi / 2)],
)
def test_wrap_angle(theta, expected):
    assert wrap_angle(theta) == pytest.approx(expected)


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("LOG_LEVEL", "verbose")
    monkeypatch.setenv("USE_RAY", "1")
    monkeypatch.setenv("BEVNAV_OUTPUT_ROOT", "/tmp/bevnav-runs")
    settings = Settings()
    assert settings.log_level == "INFO"
    assert settings.use_ray is True
    assert settings.output_root == "/tmp/bevnav-runs"
