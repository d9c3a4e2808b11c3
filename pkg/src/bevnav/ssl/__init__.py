"""Auxiliary self-supervised objectives over encoder latents."""

from bevnav.ssl.augment import AugmentConfig, augment
from bevnav.ssl.losses import cosine_loss, info_nce, l2_normalize
from bevnav.ssl.spatial import SpatialContrastiveHead, scl_loss, scl_loss_from_latents
from bevnav.ssl.temporal import TemporalContrastiveHead, tcl_loss, tcl_loss_from_latents

__all__ = [
    "AugmentConfig", "augment",
    "cosine_loss", "info_nce", "l2_normalize",
    "SpatialContrastiveHead", "scl_loss", "scl_loss_from_latents",
    "TemporalContrastiveHead", "tcl_loss", "tcl_loss_from_latents",
]
