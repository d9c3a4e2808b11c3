"""Sparse-dense BEV network.

pillarize -> sparse conv blocks (stride 2) -> densify -> dense 3x3 conv blocks
(stride 1) -> global max-pool. The pooled vector is the latent state fed to
the policy, the critics and the auxiliary heads.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from bevnav.bev.cloud import PointCloud
from bevnav.bev.pillars import PILLAR_FEATURES, PillarConfig, SparseBEVGrid, pillarize_batch
from bevnav.bev.sparse_conv import SparseConvBlock
from bevnav.common.errors import ShapeError
from bevnav.nn import tensor as T
from bevnav.nn.conv import global_max_pool, scatter_dense
from bevnav.nn.layers import Conv2d, Module
from bevnav.nn.tensor import Tensor


class EncoderConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    in_channels: int = Field(default=PILLAR_FEATURES, ge=1)
    sparse_channels: tuple[int, ...] = (16, 32, 64, 128)
    dense_blocks: int = Field(default=3, ge=0)
    dense_channels: int = Field(default=128, ge=1)

    @property
    def latent_dim(self) -> int:
        if self.dense_blocks:
            return self.dense_channels
        return self.sparse_channels[-1] if self.sparse_channels else self.in_channels

    def feature_shape(self, pillars: PillarConfig) -> tuple[int, int, int]:
        """(H', W', C) of the dense feature map."""
        h, w = pillars.grid_shape
        for _ in self.sparse_channels:
            h, w = (h - 1) // 2 + 1, (w - 1) // 2 + 1
        return h, w, self.latent_dim


@dataclass
class BEVFeature:
    """Dense feature map, stored NCHW."""

    tensor: Tensor

    @property
    def shape(self) -> tuple[int, ...]:
        return self.tensor.shape

    def hwc(self, batch: int = 0) -> np.ndarray:
        return np.ascontiguousarray(self.tensor.data[batch].transpose(1, 2, 0))


class SparseDenseBEVNet(Module):
    def __init__(self, cfg: EncoderConfig, rng: np.random.Generator) -> None:
        self.cfg = cfg
        chans = [cfg.in_channels, *cfg.sparse_channels]
        self.sparse = [SparseConvBlock(a, b, rng) for a, b in zip(chans[:-1], chans[1:], strict=True)]
        dense_in = chans[-1]
        self.dense = []
        for _ in range(cfg.dense_blocks):
            self.dense.append(Conv2d(dense_in, cfg.dense_channels, 3, rng, stride=1, padding=1))
            dense_in = cfg.dense_channels

    @property
    def latent_dim(self) -> int:
        return self.cfg.latent_dim

    def forward(self, grid: SparseBEVGrid) -> tuple[BEVFeature, Tensor]:
        if grid.channels != self.cfg.in_channels:
            raise ShapeError(f"encoder expects {self.cfg.in_channels} pillar features, got {grid.channels}")
        for block in self.sparse:
            grid = block(grid)
        h, w = grid.grid_shape
        x = scatter_dense(grid.features, grid.coords, (grid.batch_size, grid.channels, h, w))
        for conv in self.dense:
            x = T.relu(conv(x))
        return BEVFeature(x), global_max_pool(x)


def encode_batch(
    clouds: Sequence[PointCloud], pillars: PillarConfig, net: SparseDenseBEVNet
) -> tuple[BEVFeature, Tensor]:
    """Encode a batch of clouds. Returns the feature map and (B, latent_dim) latents."""
    return net(pillarize_batch(clouds, pillars))


def encode(cloud: PointCloud, pillars: PillarConfig, net: SparseDenseBEVNet) -> tuple[BEVFeature, Tensor]:
    return encode_batch([cloud], pillars, net)
