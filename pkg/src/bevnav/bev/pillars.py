"""Pillarization: bin a point cloud into vertical columns and aggregate each
occupied column into a 6-dim feature row.

Rows index the x axis (lateral), columns the y axis (forward); z is collapsed.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from bevnav.bev.cloud import PointCloud
from bevnav.nn.tensor import Tensor

PILLAR_FEATURES = 6
_INTEGRAL_TOL = 1e-6


class PillarConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    x_range: tuple[float, float] = (-4.8, 4.8)
    y_range: tuple[float, float] = (0.0, 4.8)
    z_range: tuple[float, float] = (0.0, 2.0)
    cell_x: float = 0.15
    cell_y: float = 0.075

    @model_validator(mode="after")
    def _check_grid(self) -> PillarConfig:
        for axis, (lo, hi), cell in (
            ("x", self.x_range, self.cell_x),
            ("y", self.y_range, self.cell_y),
        ):
            if not hi > lo:
                raise ValueError(f"{axis}_range must be increasing, got ({lo}, {hi})")
            if cell <= 0:
                raise ValueError(f"cell_{axis} must be positive, got {cell}")
            cells = (hi - lo) / cell
            if abs(cells - round(cells)) > _INTEGRAL_TOL * max(1.0, cells):
                raise ValueError(f"{axis}_range extent {hi - lo} is not a multiple of cell_{axis}={cell}")
        if not self.z_range[1] > self.z_range[0]:
            raise ValueError(f"z_range must be increasing, got {self.z_range}")
        return self

    @property
    def grid_shape(self) -> tuple[int, int]:
        h = round((self.x_range[1] - self.x_range[0]) / self.cell_x)
        w = round((self.y_range[1] - self.y_range[0]) / self.cell_y)
        return int(h), int(w)

    @classmethod
    def desk(cls) -> PillarConfig:
        return cls()

    @classmethod
    def simulator(cls) -> PillarConfig:
        """128 x 128 grid covering 19.2 m laterally and 9.6 m ahead."""
        return cls(x_range=(-9.6, 9.6), y_range=(0.0, 9.6), z_range=(0.0, 2.0), cell_x=0.15, cell_y=0.075)

    @classmethod
    def paper_literal(cls) -> PillarConfig:
        """Ranges and pillar sizes taken at face value (128 x 128, z fully collapsed)."""
        return cls(x_range=(-9.6, 9.6), y_range=(-1.6, 0.448), z_range=(0.0, 10.0), cell_x=0.15, cell_y=0.016)


@dataclass
class SparseBEVGrid:
    """Active cells of a batch of BEV grids.

    ``coords`` is (M, 3) int64 rows ``(batch, row, col)``, sorted and unique.
    ``features`` is (M, C). ``counts`` holds raw point counts per cell when the
    grid came straight from pillarization.
    """

    coords: np.ndarray
    features: Tensor
    grid_shape: tuple[int, int]
    batch_size: int = 1
    counts: np.ndarray | None = None

    @property
    def num_active(self) -> int:
        return int(self.coords.shape[0])

    @property
    def channels(self) -> int:
        return int(self.features.shape[1])

    def as_dict(self, batch: int = 0) -> dict[tuple[int, int], np.ndarray]:
        """``{(row, col): feature}`` for one batch element."""
        sel = self.coords[:, 0] == batch
        return {
            (int(r), int(c)): self.features.data[i]
            for i, (r, c) in zip(np.flatnonzero(sel), self.coords[sel, 1:], strict=True)
        }

    def densify(self) -> np.ndarray:
        h, w = self.grid_shape
        out = np.zeros((self.batch_size, self.channels, h, w), dtype=self.features.dtype)
        b, r, c = self.coords.T
        out[b, :, r, c] = self.features.data
        return out

    def occupancy(self, batch: int = 0) -> np.ndarray:
        """(H, W) raw point counts; zero where no point landed."""
        out = np.zeros(self.grid_shape, dtype=np.int64)
        if self.counts is None:
            return out
        sel = self.coords[:, 0] == batch
        out[self.coords[sel, 1], self.coords[sel, 2]] = self.counts[sel]
        return out


def _bin_points(points: np.ndarray, cfg: PillarConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (kept points as float64, row, col) for in-range points."""
    pts = points.astype(np.float64)
    (x0, x1), (y0, y1), (z0, z1) = cfg.x_range, cfg.y_range, cfg.z_range
    keep = (
        (pts[:, 0] >= x0) & (pts[:, 0] < x1)
        & (pts[:, 1] >= y0) & (pts[:, 1] < y1)
        & (pts[:, 2] >= z0) & (pts[:, 2] < z1)
    )
    pts = pts[keep]
    h, w = cfg.grid_shape
    # clamp guards against (x1 - eps - x0) / cell rounding up to h
    row = np.minimum(np.floor((pts[:, 0] - x0) / cfg.cell_x).astype(np.int64), h - 1)
    col = np.minimum(np.floor((pts[:, 1] - y0) / cfg.cell_y).astype(np.int64), w - 1)
    return pts, row, col


def _aggregate(
    pts: np.ndarray, row: np.ndarray, col: np.ndarray, cfg: PillarConfig
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    _, w = cfg.grid_shape
    key = row * w + col
    # full lexicographic sort makes the reduction order independent of input order
    order = np.lexsort((pts[:, 2], pts[:, 1], pts[:, 0], key))
    pts, key = pts[order], key[order]
    cells, starts, counts = np.unique(key, return_index=True, return_counts=True)
    sums = np.add.reduceat(pts, starts, axis=0) if len(pts) else np.zeros((0, 3))
    zmin = np.minimum.reduceat(pts[:, 2], starts) if len(pts) else np.zeros(0)
    zmax = np.maximum.reduceat(pts[:, 2], starts) if len(pts) else np.zeros(0)
    rows, cols = cells // w, cells % w
    cx = cfg.x_range[0] + (rows + 0.5) * cfg.cell_x
    cy = cfg.y_range[0] + (cols + 0.5) * cfg.cell_y
    mean = sums / counts[:, None]
    feats = np.stack(
        [np.log1p(counts), mean[:, 0] - cx, mean[:, 1] - cy, mean[:, 2], zmin, zmax], axis=1
    )
    return rows, cols, counts, feats


def pillarize(cloud: PointCloud, cfg: PillarConfig) -> SparseBEVGrid:
    """Bin a single cloud. Out-of-range points are dropped silently.

    Feature row: ``[log1p(count), mean dx from cell center, mean dy from cell
    center, mean z, min z, max z]``.
    """
    return pillarize_batch([cloud], cfg)


def pillarize_batch(clouds: Sequence[PointCloud], cfg: PillarConfig) -> SparseBEVGrid:
    coords: list[np.ndarray] = []
    feats: list[np.ndarray] = []
    counts: list[np.ndarray] = []
    for b, cloud in enumerate(clouds):
        pts, row, col = _bin_points(cloud.points, cfg)
        rows, cols, n, f = _aggregate(pts, row, col, cfg)
        coords.append(np.stack([np.full_like(rows, b), rows, cols], axis=1))
        feats.append(f)
        counts.append(n)
    all_coords = np.concatenate(coords, axis=0).astype(np.int64) if coords else np.zeros((0, 3), np.int64)
    all_feats = (
        np.concatenate(feats, axis=0).astype(np.float32)
        if feats
        else np.zeros((0, PILLAR_FEATURES), np.float32)
    )
    return SparseBEVGrid(
        coords=all_coords.reshape(-1, 3),
        features=Tensor(all_feats.reshape(-1, PILLAR_FEATURES)),
        grid_shape=cfg.grid_shape,
        batch_size=len(clouds),
        counts=np.concatenate(counts).astype(np.int64) if counts else np.zeros(0, np.int64),
    )
