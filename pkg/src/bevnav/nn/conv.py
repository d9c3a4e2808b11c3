"""Spatial primitives: dense 2-D convolution, global max-pool, sparse convolution
and sparse-to-dense scatter. Layouts are NCHW for dense maps and (M, C) rows for
sparse sites."""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from bevnav.common.errors import ShapeError
from bevnav.nn.tensor import Tensor, make_result


def conv2d(
    x: Tensor,
    weight: Tensor,
    bias: Tensor | None = None,
    stride: int = 1,
    padding: int = 0,
) -> Tensor:
    """Dense cross-correlation. ``x``: (B, C, H, W), ``weight``: (O, C, kh, kw)."""
    if x.ndim != 4 or weight.ndim != 4 or x.shape[1] != weight.shape[1]:
        raise ShapeError(f"conv2d: input {x.shape} does not match weight {weight.shape}")
    if bias is not None and bias.shape != (weight.shape[0],):
        raise ShapeError(f"conv2d: bias {bias.shape} does not match weight {weight.shape}")
    if stride < 1 or padding < 0:
        raise ShapeError(f"conv2d: invalid stride={stride} padding={padding}")

    batch, channels, height, width = x.shape
    out_ch, _, kh, kw = weight.shape
    out_h = (height + 2 * padding - kh) // stride + 1
    out_w = (width + 2 * padding - kw) // stride + 1
    if out_h <= 0 or out_w <= 0:
        raise ShapeError(f"conv2d: input {x.shape} too small for kernel {weight.shape}")

    xp = np.pad(x.data, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    windows = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    windows = windows[:, :, :out_h, :out_w]
    cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(batch * out_h * out_w, channels * kh * kw)
    wmat = weight.data.reshape(out_ch, -1)
    out = (cols @ wmat.T).reshape(batch, out_h, out_w, out_ch).transpose(0, 3, 1, 2)
    if bias is not None:
        out = out + bias.data[None, :, None, None]
    out = np.ascontiguousarray(out)

    def vjp(g: np.ndarray) -> list[np.ndarray | None]:
        g2 = g.transpose(0, 2, 3, 1).reshape(-1, out_ch)
        gw = (g2.T @ cols).reshape(weight.shape)
        gcols = (g2 @ wmat).reshape(batch, out_h, out_w, channels, kh, kw)
        gxp = np.zeros_like(xp)
        for i in range(kh):
            for j in range(kw):
                gxp[:, :, i : i + stride * out_h : stride, j : j + stride * out_w : stride] += (
                    gcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
                )
        gx = gxp[:, :, padding : padding + height, padding : padding + width]
        grads: list[np.ndarray | None] = [np.ascontiguousarray(gx), gw]
        if bias is not None:
            grads.append(g.sum(axis=(0, 2, 3)))
        return grads

    inputs = (x, weight) if bias is None else (x, weight, bias)
    return make_result("conv2d", out, inputs, vjp)


def global_max_pool(x: Tensor) -> Tensor:
    """(B, C, H, W) -> (B, C), maximum over spatial cells. Ties route to the first cell."""
    if x.ndim != 4:
        raise ShapeError(f"global_max_pool expects (B, C, H, W), got {x.shape}")
    batch, channels = x.shape[:2]
    flat = x.data.reshape(batch, channels, -1)
    idx = flat.argmax(axis=-1)
    out = np.take_along_axis(flat, idx[..., None], axis=-1)[..., 0]

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        gflat = np.zeros_like(flat)
        np.put_along_axis(gflat, idx[..., None], g[..., None], axis=-1)
        return (gflat.reshape(x.shape),)

    return make_result("global_max_pool", out, (x,), vjp)


def sparse_conv(
    features: Tensor,
    weight: Tensor,
    bias: Tensor | None,
    rules: Sequence[tuple[np.ndarray, np.ndarray]],
    num_out: int,
) -> Tensor:
    """Gather-scatter convolution over active sites.

    ``rules[k] = (in_idx, out_idx)`` pairs input rows with output rows for kernel
    offset ``k``; within one offset each input and each output row appears at
    most once. ``weight`` is (K, C_in, C_out).
    """
    if features.ndim != 2 or weight.ndim != 3 or features.shape[1] != weight.shape[1]:
        raise ShapeError(f"sparse_conv: features {features.shape} do not match weight {weight.shape}")
    if len(rules) != weight.shape[0]:
        raise ShapeError(f"sparse_conv: {len(rules)} rules for weight {weight.shape}")
    if bias is not None and bias.shape != (weight.shape[2],):
        raise ShapeError(f"sparse_conv: bias {bias.shape} does not match weight {weight.shape}")

    feats = features.data
    w = weight.data
    out = np.zeros((num_out, w.shape[2]), dtype=np.result_type(feats, w))
    for k, (in_idx, out_idx) in enumerate(rules):
        if len(in_idx):
            out[out_idx] += feats[in_idx] @ w[k]
    if bias is not None and num_out:
        out += bias.data

    def vjp(g: np.ndarray) -> list[np.ndarray | None]:
        gf = np.zeros_like(feats)
        gw = np.zeros_like(w)
        for k, (in_idx, out_idx) in enumerate(rules):
            if len(in_idx):
                go = g[out_idx]
                gf[in_idx] += go @ w[k].T
                gw[k] = feats[in_idx].T @ go
        grads: list[np.ndarray | None] = [gf, gw]
        if bias is not None:
            grads.append(g.sum(axis=0))
        return grads

    inputs = (features, weight) if bias is None else (features, weight, bias)
    return make_result("sparse_conv", out, inputs, vjp)


def scatter_dense(features: Tensor, coords: np.ndarray, shape: tuple[int, int, int, int]) -> Tensor:
    """Write (M, C) site rows into a zero (B, C, H, W) map at ``coords`` (M, 3) = (b, row, col)."""
    if features.ndim != 2 or features.shape[1] != shape[1] or len(coords) != features.shape[0]:
        raise ShapeError(f"scatter_dense: features {features.shape} vs coords {coords.shape} / {shape}")
    out = np.zeros(shape, dtype=features.dtype)
    b, r, c = coords[:, 0], coords[:, 1], coords[:, 2]
    out[b, :, r, c] = features.data

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        return (np.ascontiguousarray(g[b, :, r, c]),)

    return make_result("scatter_dense", out, (features,), vjp)
