"""Bird's-eye-view encoder: point clouds, pillars, sparse-dense network."""

from bevnav.bev.cloud import PointCloud, downsample_cloud, read_xyz, write_xyz
from bevnav.bev.encoder import BEVFeature, EncoderConfig, SparseDenseBEVNet, encode, encode_batch
from bevnav.bev.pillars import PillarConfig, SparseBEVGrid, pillarize, pillarize_batch
from bevnav.bev.sparse_conv import SparseConvBlock, build_rulebook, sparse_conv_block

__all__ = [
    "PointCloud", "downsample_cloud", "read_xyz", "write_xyz",
    "PillarConfig", "SparseBEVGrid", "pillarize", "pillarize_batch",
    "SparseConvBlock", "build_rulebook", "sparse_conv_block",
    "EncoderConfig", "BEVFeature", "SparseDenseBEVNet", "encode", "encode_batch",
]
