"""Spatial contrastive learning: two shifted views of the same cloud predict each other."""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from bevnav.bev.cloud import PointCloud
from bevnav.bev.encoder import SparseDenseBEVNet, encode_batch
from bevnav.bev.pillars import PillarConfig
from bevnav.nn.layers import MLP, Module
from bevnav.nn.tensor import Tensor
from bevnav.ssl.augment import AugmentConfig, augment
from bevnav.ssl.losses import cosine_loss


class SpatialContrastiveHead(Module):
    """Projection ``g`` (latent -> 256 -> 128) and bottleneck prediction ``h`` (128 -> 64 -> 128)."""

    def __init__(
        self,
        rng: np.random.Generator,
        latent_dim: int = 128,
        hidden: int = 256,
        proj_dim: int = 128,
        bottleneck: int = 64,
    ) -> None:
        self.projector = MLP([latent_dim, hidden, proj_dim], rng)
        self.predictor: Module = MLP([proj_dim, bottleneck, proj_dim], rng)

    def forward(self, s1: Tensor, s2: Tensor) -> Tensor:
        return scl_loss_from_latents(s1, s2, self)


def scl_loss_from_latents(s1: Tensor, s2: Tensor, head: SpatialContrastiveHead) -> Tensor:
    """Symmetrized SimSiam loss; the target branch is cut after the projector."""
    z1, z2 = head.projector(s1), head.projector(s2)
    p1, p2 = head.predictor(z1), head.predictor(z2)
    return 0.5 * cosine_loss(p1, z2.detach()) + 0.5 * cosine_loss(p2, z1.detach())


def scl_loss(
    clouds: Sequence[PointCloud],
    encoder: SparseDenseBEVNet,
    pillars: PillarConfig,
    head: SpatialContrastiveHead,
    rng: np.random.Generator,
    cfg: AugmentConfig | None = None,
) -> Tensor:
    cfg = cfg or AugmentConfig()
    view1 = [augment(c, cfg, rng) for c in clouds]
    view2 = [augment(c, cfg, rng) for c in clouds]
    _, s1 = encode_batch(view1, pillars, encoder)
    _, s2 = encode_batch(view2, pillars, encoder)
    return scl_loss_from_latents(s1, s2, head)
