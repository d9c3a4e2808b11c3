"""Point clouds: container, fixed-size resampling and XYZ text files."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np

from bevnav.common.errors import CloudFileError, EmptyCloudError, ShapeError

Frame = Literal["camera", "robot"]


@dataclass(frozen=True)
class PointCloud:
    """(N, 3) float32 points in meters.

    In the camera frame x points right, y points forward and z is the height
    above the floor.
    """

    points: np.ndarray
    frame: Frame = "camera"

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float32)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ShapeError(f"point cloud must be (N, 3), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ShapeError("point cloud contains NaN or Inf coordinates")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def translated(self, offset: np.ndarray) -> PointCloud:
        return PointCloud(self.points + np.asarray(offset, dtype=np.float32), self.frame)


def downsample_cloud(raw: PointCloud, target: int, rng: np.random.Generator) -> PointCloud:
    """Return exactly ``target`` points.

    Larger clouds give a uniform subset without replacement; smaller ones are
    padded by resampling their own points uniformly. A cloud of exactly
    ``target`` points is returned unchanged.
    """
    n = len(raw)
    if n == 0:
        raise EmptyCloudError("cannot downsample an empty point cloud")
    if n == target:
        return raw
    if n > target:
        idx = np.sort(rng.choice(n, size=target, replace=False))
        return PointCloud(raw.points[idx], raw.frame)
    extra = rng.integers(0, n, size=target - n)
    return PointCloud(np.concatenate([raw.points, raw.points[extra]], axis=0), raw.frame)


def read_xyz(path: str | Path) -> PointCloud:
    """Parse one ``x y z`` triple per line. Blank lines and ``#`` comments are skipped."""
    rows: list[tuple[float, float, float]] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.replace(",", " ").split()
            if len(parts) != 3:
                raise CloudFileError(f"expected 3 values, got {len(parts)}", line=lineno)
            try:
                x, y, z = (float(p) for p in parts)
            except ValueError as e:
                raise CloudFileError(f"not a number: {text!r}", line=lineno) from e
            if not all(np.isfinite((x, y, z))):
                raise CloudFileError(f"non-finite coordinate: {text!r}", line=lineno)
            rows.append((x, y, z))
    if not rows:
        raise CloudFileError(f"{path}: no points")
    return PointCloud(np.asarray(rows, dtype=np.float32))


def write_xyz(path: str | Path, cloud: PointCloud) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, cloud.points, fmt="%.6f")
    return path
