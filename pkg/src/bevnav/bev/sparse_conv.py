"""Regular (non-submanifold) sparse convolution over active BEV cells.

An output cell is active iff at least one active input cell lies in its
receptive field. Kernel offsets are indexed ``k = di * kernel + dj`` and the
weight for offset ``k`` is ``W_dense[:, :, di, dj].T``.
"""
from __future__ import annotations

import numpy as np

from bevnav.bev.pillars import SparseBEVGrid
from bevnav.nn import tensor as T
from bevnav.nn.conv import sparse_conv
from bevnav.nn.layers import Module, Parameter, uniform_init

Rule = tuple[np.ndarray, np.ndarray]


def output_shape(grid_shape: tuple[int, int], kernel: int, stride: int, padding: int) -> tuple[int, int]:
    h, w = grid_shape
    return (h + 2 * padding - kernel) // stride + 1, (w + 2 * padding - kernel) // stride + 1


def build_rulebook(
    coords: np.ndarray,
    grid_shape: tuple[int, int],
    kernel: int = 3,
    stride: int = 2,
    padding: int = 1,
) -> tuple[np.ndarray, list[Rule], tuple[int, int]]:
    """Return (output coords, per-offset (in_idx, out_idx) rules, output grid shape).

    Input row ``r`` feeds output row ``o = (r + padding - di) / stride`` when that
    division is exact and ``o`` lies inside the output grid; likewise for columns.
    """
    out_h, out_w = output_shape(grid_shape, kernel, stride, padding)
    b, r, c = coords[:, 0], coords[:, 1], coords[:, 2]
    candidates: list[tuple[np.ndarray, np.ndarray]] = []
    for di in range(kernel):
        nr = r + padding - di
        ok_r = (nr % stride == 0) & (nr >= 0) & (nr // stride < out_h)
        for dj in range(kernel):
            nc = c + padding - dj
            ok = ok_r & (nc % stride == 0) & (nc >= 0) & (nc // stride < out_w)
            idx = np.flatnonzero(ok)
            key = (b[idx] * out_h + nr[idx] // stride) * out_w + nc[idx] // stride
            candidates.append((idx, key))

    all_keys = np.concatenate([key for _, key in candidates]) if candidates else np.zeros(0, np.int64)
    out_keys = np.unique(all_keys)
    rules = [(idx, np.searchsorted(out_keys, key)) for idx, key in candidates]
    out_coords = np.stack(
        [out_keys // (out_h * out_w), (out_keys // out_w) % out_h, out_keys % out_w], axis=1
    ).astype(np.int64)
    return out_coords.reshape(-1, 3), rules, (out_h, out_w)


def sparse_conv_block(
    grid: SparseBEVGrid,
    weight: T.Tensor,
    bias: T.Tensor | None = None,
    stride: int = 2,
    padding: int = 1,
    activation: bool = True,
) -> SparseBEVGrid:
    kernel = int(round(np.sqrt(weight.shape[0])))
    out_coords, rules, out_shape = build_rulebook(grid.coords, grid.grid_shape, kernel, stride, padding)
    feats = sparse_conv(grid.features, weight, bias, rules, num_out=len(out_coords))
    if activation:
        feats = T.relu(feats)
    return SparseBEVGrid(
        coords=out_coords, features=feats, grid_shape=out_shape, batch_size=grid.batch_size
    )


class SparseConvBlock(Module):
    """3x3 stride-2 sparse convolution followed by ReLU."""

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        rng: np.random.Generator,
        kernel: int = 3,
        stride: int = 2,
        padding: int = 1,
        activation: bool = True,
    ) -> None:
        fan_in = in_channels * kernel * kernel
        self.kernel = kernel
        self.stride = stride
        self.padding = padding
        self.activation = activation
        self.weight = Parameter(uniform_init(rng, (kernel * kernel, in_channels, out_channels), fan_in))
        self.bias = Parameter(uniform_init(rng, (out_channels,), fan_in))

    def forward(self, grid: SparseBEVGrid) -> SparseBEVGrid:
        return sparse_conv_block(
            grid, self.weight, self.bias, self.stride, self.padding, self.activation
        )

    def dense_weight(self) -> np.ndarray:
        """The equivalent (out, in, k, k) dense convolution kernel."""
        k = self.kernel
        w = self.weight.data.reshape(k, k, *self.weight.shape[1:])
        return np.ascontiguousarray(w.transpose(3, 2, 0, 1))
