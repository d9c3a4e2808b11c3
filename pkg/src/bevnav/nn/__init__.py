"""Minimal tensor library: reverse-mode tape, layers, Adam, checkpoints.

Provides:
  - Tensor / Tape / backward: eager numpy values with recorded vector-Jacobian products
  - conv2d, global_max_pool, sparse_conv, scatter_dense: spatial primitives
  - Parameter / Module / Linear / MLP / Conv2d: named parameter trees
  - Adam with a step-decay learning-rate schedule
  - checkpoint codec (JSON manifest + float32 payload) and grad_check
"""

from bevnav.nn.checkpoint import decode_checkpoint, encode_checkpoint, load_tensors, save_tensors
from bevnav.nn.conv import conv2d, global_max_pool, scatter_dense, sparse_conv
from bevnav.nn.gradcheck import GradCheckReport, grad_check
from bevnav.nn.layers import MLP, Conv2d, Identity, Linear, Module, Parameter
from bevnav.nn.optim import Adam, AdamState, StepSchedule
from bevnav.nn.registry import Block, BlockCase, BlockRegistry, default_registry
from bevnav.nn.tensor import Tape, Tensor, backward, set_finite_checks

__all__ = [
    "Tensor", "Tape", "backward", "set_finite_checks",
    "conv2d", "global_max_pool", "sparse_conv", "scatter_dense",
    "Parameter", "Module", "Linear", "MLP", "Conv2d", "Identity",
    "Adam", "AdamState", "StepSchedule",
    "encode_checkpoint", "decode_checkpoint", "save_tensors", "load_tensors",
    "GradCheckReport", "grad_check",
    "Block", "BlockCase", "BlockRegistry", "default_registry",
]
