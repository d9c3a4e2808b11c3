"""Temporal contrastive learning: predict the embedding ``K`` steps ahead from the
current latent and the actions taken in between, contrasted against the batch."""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from bevnav.bev.cloud import PointCloud
from bevnav.bev.encoder import SparseDenseBEVNet, encode_batch
from bevnav.bev.pillars import PillarConfig
from bevnav.common.errors import ShapeError
from bevnav.nn import tensor as T
from bevnav.nn.layers import MLP, Module
from bevnav.nn.tensor import Tensor
from bevnav.ssl.losses import info_nce

ACTION_DIM = 2


class TemporalContrastiveHead(Module):
    """Action encoder ``2(K+1) -> 64 -> 64``, predictor ``(64 + latent) -> 128 -> 64``
    and target projection ``latent -> 64``."""

    def __init__(
        self,
        window: int,
        rng: np.random.Generator,
        latent_dim: int = 128,
        action_hidden: int = 64,
        embed_dim: int = 64,
        predictor_hidden: int = 128,
        temperature: float = 0.1,
    ) -> None:
        if window < 0:
            raise ShapeError(f"prediction window must be >= 0, got {window}")
        self.window = window
        self.temperature = temperature
        self.action_encoder = MLP([ACTION_DIM * (window + 1), action_hidden, action_hidden], rng)
        self.predictor = MLP([action_hidden + latent_dim, predictor_hidden, embed_dim], rng)
        self.target = MLP([latent_dim, embed_dim], rng)

    def forward(self, s_t: Tensor, actions: np.ndarray, s_tk: Tensor) -> Tensor:
        return tcl_loss_from_latents(s_t, actions, s_tk, self)


def tcl_loss_from_latents(s_t: Tensor, actions: np.ndarray, s_tk: Tensor, head: TemporalContrastiveHead) -> Tensor:
    """``actions`` is (N, K+1, 2) holding a_t .. a_{t+K}. ``s_tk`` is cut before the target MLP."""
    n = s_t.shape[0]
    if n == 0:
        raise ShapeError("tcl_loss needs a non-empty batch")
    acts = np.asarray(actions, dtype=s_t.dtype).reshape(n, -1)
    if acts.shape[1] != ACTION_DIM * (head.window + 1):
        raise ShapeError(f"tcl_loss: window {head.window} expects {head.window + 1} actions, got {actions.shape}")
    c = head.action_encoder(Tensor(acts))
    x_hat = head.predictor(T.concat([c, s_t], axis=1))
    x = head.target(s_tk.detach())
    return info_nce(x_hat, x, head.temperature)


def tcl_loss(
    clouds_t: Sequence[PointCloud],
    actions: np.ndarray,
    clouds_tk: Sequence[PointCloud],
    encoder: SparseDenseBEVNet,
    pillars: PillarConfig,
    head: TemporalContrastiveHead,
) -> Tensor:
    _, s_t = encode_batch(clouds_t, pillars, encoder)
    _, s_tk = encode_batch(clouds_tk, pillars, encoder)
    return tcl_loss_from_latents(s_t, actions, s_tk, head)
