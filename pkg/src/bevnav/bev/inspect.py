"""BEV occupancy dumps for the ``inspect`` command."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from PIL import Image

from bevnav.bev.cloud import read_xyz
from bevnav.bev.pillars import PillarConfig, pillarize
from bevnav.common.logging import get_logger

log = get_logger("bevnav.bev.inspect")


def occupancy_to_pixels(counts: np.ndarray) -> np.ndarray:
    """Scale counts to 0..255; any occupied cell maps to at least 1."""
    peak = int(counts.max(initial=0))
    if peak == 0:
        return np.zeros(counts.shape, dtype=np.uint8)
    return np.ceil(255.0 * counts / peak).astype(np.uint8)


def write_occupancy_csv(path: str | Path, counts: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["row", "col", "count"])
        for r, c in zip(*np.nonzero(counts), strict=True):
            writer.writerow([int(r), int(c), int(counts[r, c])])
    return path


def write_occupancy_pgm(path: str | Path, counts: np.ndarray) -> Path:
    """8-bit binary PGM (P5), one pixel per cell, row 0 at the top."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(occupancy_to_pixels(counts)).save(path, format="PPM")
    return path


def inspect_cloud(cloud_file: str | Path, pillars: PillarConfig, out_dir: str | Path) -> dict[str, object]:
    cloud = read_xyz(cloud_file)
    grid = pillarize(cloud, pillars)
    counts = grid.occupancy()
    out = Path(out_dir)
    stem = Path(cloud_file).stem
    csv_path = write_occupancy_csv(out / f"{stem}_occupancy.csv", counts)
    pgm_path = write_occupancy_pgm(out / f"{stem}_occupancy.pgm", counts)
    summary = {
        "points": len(cloud),
        "in_range": int(counts.sum()),
        "active_cells": grid.num_active,
        "grid_shape": list(pillars.grid_shape),
        "csv": str(csv_path),
        "pgm": str(pgm_path),
    }
    log.info("cloud_inspected", **summary)
    return summary
