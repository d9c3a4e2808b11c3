from __future__ import annotations

import csv

import numpy as np
from PIL import Image
from structlog.testing import capture_logs

from bevnav.bev.inspect import inspect_cloud, occupancy_to_pixels
from bevnav.bev.pillars import PillarConfig


def test_pixels_scale_to_peak():
    counts = np.array([[0, 1], [4, 0]])
    np.testing.assert_array_equal(occupancy_to_pixels(counts), [[0, 64], [255, 0]])
    assert occupancy_to_pixels(np.zeros((2, 2), dtype=np.int64)).max() == 0


def test_one_point_gives_one_pixel(tmp_path):
    cloud = tmp_path / "one.xyz"
    cloud.write_text("0.1 1.0 0.5\n", encoding="utf-8")
    with capture_logs() as logs:
        summary = inspect_cloud(cloud, PillarConfig.desk(), tmp_path / "out")

    pixels = np.array(Image.open(summary["pgm"]))
    assert pixels.shape == (64, 64)
    assert np.count_nonzero(pixels) == 1
    assert summary["points"] == summary["in_range"] == summary["active_cells"] == 1
    assert summary["grid_shape"] == [64, 64]
    assert any(e["event"] == "cloud_inspected" for e in logs)

    with open(summary["csv"], newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 1
    row, col = int(rows[0]["row"]), int(rows[0]["col"])
    assert pixels[row, col] == 255
    assert rows[0]["count"] == "1"


def test_out_of_range_points_counted_separately(tmp_path):
    cloud = tmp_path / "mixed.xyz"
    cloud.write_text("0 1 0.5\n0.01 1.01 0.6\n20 1 0.5\n", encoding="utf-8")
    summary = inspect_cloud(cloud, PillarConfig.desk(), tmp_path)
    assert summary["points"] == 3
    assert summary["in_range"] == 2
    assert summary["active_cells"] == 1
    assert summary["csv"].endswith("mixed_occupancy.csv")
