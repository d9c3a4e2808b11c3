"""Similarity losses over batches of embeddings (rows are samples)."""
from __future__ import annotations

import numpy as np

from bevnav.common.errors import ShapeError
from bevnav.nn import tensor as T
from bevnav.nn.tensor import Tensor

NORM_EPS = 1e-8


def l2_normalize(x: Tensor, eps: float = NORM_EPS) -> Tensor:
    norm = T.sqrt(T.sum(T.square(x), axis=1, keepdims=True) + eps)
    return x / norm


def cosine_loss(pred: Tensor, target: Tensor) -> Tensor:
    """``1 - cos(pred, target)`` averaged over the batch; lies in [0, 2]."""
    if pred.shape != target.shape or pred.ndim != 2:
        raise ShapeError(f"cosine_loss: shapes differ {pred.shape} vs {target.shape}")
    cos = T.sum(l2_normalize(pred) * l2_normalize(target), axis=1)
    return T.mean(1.0 - cos)


def info_nce(queries: Tensor, keys: Tensor, temperature: float) -> Tensor:
    """Row ``i`` of ``keys`` is the positive for query ``i``; the other rows are negatives."""
    if queries.ndim != 2 or queries.shape != keys.shape:
        raise ShapeError(f"info_nce: shapes differ {queries.shape} vs {keys.shape}")
    n = queries.shape[0]
    if n == 0:
        raise ShapeError("info_nce needs at least one sample")
    logits = T.matmul(l2_normalize(queries), T.transpose(l2_normalize(keys))) / temperature
    log_probs = T.log_softmax(logits, axis=1)
    positives = T.sum(log_probs * np.eye(n, dtype=log_probs.dtype), axis=1)
    return -T.mean(positives)
