"""Every trainable block registered with a small test case, and the gradient-check suite over them."""
from __future__ import annotations

import numpy as np

from bevnav.agent.networks import Actor, TwinCritic
from bevnav.bev.encoder import EncoderConfig, SparseDenseBEVNet
from bevnav.bev.pillars import PILLAR_FEATURES, SparseBEVGrid
from bevnav.bev.sparse_conv import SparseConvBlock
from bevnav.common.logging import get_logger
from bevnav.nn import tensor as T
from bevnav.nn.gradcheck import GradCheckReport, grad_check
from bevnav.nn.layers import MLP, Conv2d, Module
from bevnav.nn.registry import BlockCase, BlockRegistry, default_registry
from bevnav.nn.tensor import Tensor
from bevnav.ssl.losses import cosine_loss
from bevnav.ssl.spatial import SpatialContrastiveHead
from bevnav.ssl.temporal import TemporalContrastiveHead

log = get_logger("bevnav.blocks")

_LATENT = 8


def _random_coords(rng: np.random.Generator, grid: tuple[int, int], per_batch: int, batch: int) -> np.ndarray:
    h, w = grid
    rows = []
    for b in range(batch):
        flat = np.sort(rng.choice(h * w, size=per_batch, replace=False))
        rows.append(np.stack([np.full(per_batch, b), flat // w, flat % w], axis=1))
    return np.concatenate(rows).astype(np.int64)


def _grid_loss(coords: np.ndarray, feats: np.ndarray, grid: tuple[int, int], batch: int, proj_seed: int):
    def loss(model: Module) -> Tensor:
        out = model(SparseBEVGrid(coords, Tensor(feats, dtype=np.float64), grid, batch))
        x = out[1] if isinstance(out, tuple) else out.features
        w = np.random.default_rng(proj_seed).standard_normal(x.shape)
        return T.sum(x * Tensor(w, dtype=np.float64))

    return loss


def _sparse_conv(seed: int) -> BlockCase:
    rng = np.random.default_rng(seed)
    grid, batch = (8, 8), 2
    coords = _random_coords(rng, grid, 12, batch)
    feats = rng.standard_normal((len(coords), 3))
    model = SparseConvBlock(3, 4, rng)
    return BlockCase(model, (), _grid_loss(coords, feats, grid, batch, seed + 1))


def _encoder(seed: int) -> BlockCase:
    rng = np.random.default_rng(seed)
    grid, batch = (8, 8), 2
    coords = _random_coords(rng, grid, 16, batch)
    feats = rng.standard_normal((len(coords), PILLAR_FEATURES))
    cfg = EncoderConfig(sparse_channels=(4, 6), dense_blocks=1, dense_channels=_LATENT)
    model = SparseDenseBEVNet(cfg, rng)
    return BlockCase(model, (), _grid_loss(coords, feats, grid, batch, seed + 1))


def _conv2d(seed: int) -> BlockCase:
    rng = np.random.default_rng(seed)
    return BlockCase(Conv2d(3, 4, 3, rng, padding=1), (Tensor(rng.standard_normal((2, 3, 5, 5))),))


def _mlp(seed: int) -> BlockCase:
    rng = np.random.default_rng(seed)
    return BlockCase(MLP([6, 10, 3], rng), (Tensor(rng.standard_normal((4, 6))),))


def _actor(seed: int) -> BlockCase:
    rng = np.random.default_rng(seed)
    latent = rng.standard_normal((4, _LATENT))
    goal = rng.uniform(-1.0, 1.0, size=(4, 2))
    noise = rng.standard_normal((4, 2))

    def loss(model: Actor) -> Tensor:
        action, log_prob = model.rsample(Tensor(latent, dtype=np.float64), goal, noise)
        return T.sum(action) + T.sum(log_prob)

    return BlockCase(Actor(_LATENT, rng, hidden=16), (), loss)


def _critic(seed: int) -> BlockCase:
    rng = np.random.default_rng(seed)
    latent = rng.standard_normal((4, _LATENT))
    goal = rng.uniform(-1.0, 1.0, size=(4, 2))
    action = rng.uniform(-1.0, 1.0, size=(4, 2))

    def loss(model: TwinCritic) -> Tensor:
        q1, q2 = model(Tensor(latent, dtype=np.float64), goal, action)
        return T.sum(q1) + 2.0 * T.sum(q2)

    return BlockCase(TwinCritic(_LATENT, rng, hidden=16), (), loss)


def _scl_head(seed: int) -> BlockCase:
    rng = np.random.default_rng(seed)
    s1 = rng.standard_normal((5, _LATENT))
    s2 = rng.standard_normal((5, _LATENT))
    # targets are stop-gradient projections; hold them fixed so perturbing the
    # projector only moves the online branch
    t1 = rng.standard_normal((5, 6))
    t2 = rng.standard_normal((5, 6))
    head = SpatialContrastiveHead(rng, latent_dim=_LATENT, hidden=12, proj_dim=6, bottleneck=4)

    def loss(model: SpatialContrastiveHead) -> Tensor:
        p1 = model.predictor(model.projector(Tensor(s1, dtype=np.float64)))
        p2 = model.predictor(model.projector(Tensor(s2, dtype=np.float64)))
        return 0.5 * cosine_loss(p1, Tensor(t2, dtype=np.float64)) + 0.5 * cosine_loss(
            p2, Tensor(t1, dtype=np.float64)
        )

    return BlockCase(head, (), loss)


def _tcl_head(seed: int) -> BlockCase:
    rng = np.random.default_rng(seed)
    window = 2
    s_t = Tensor(rng.standard_normal((5, _LATENT)))
    s_tk = Tensor(rng.standard_normal((5, _LATENT)))
    actions = rng.uniform(-1.0, 1.0, size=(5, window + 1, 2))
    head = TemporalContrastiveHead(
        window, rng, latent_dim=_LATENT, action_hidden=6, embed_dim=5, predictor_hidden=10
    )
    return BlockCase(head, (s_t, actions, s_tk), lambda model, a, acts, b: model(a, acts, b))


def register_blocks(registry: BlockRegistry) -> BlockRegistry:
    registry.register("sparse_conv", _sparse_conv, "3x3 stride-2 sparse convolution + ReLU", ["encoder"])
    registry.register("conv2d", _conv2d, "dense 3x3 convolution", ["encoder"])
    registry.register("encoder", _encoder, "sparse-dense BEV encoder with global max pool", ["encoder"])
    registry.register("mlp", _mlp, "fully connected stack", ["core"])
    registry.register("actor", _actor, "tanh-squashed Gaussian policy, reparameterized", ["rl"])
    registry.register("critic", _critic, "twin Q networks", ["rl"])
    registry.register("scl_head", _scl_head, "spatial contrastive projector and predictor", ["ssl"])
    registry.register("tcl_head", _tcl_head, "temporal contrastive action, predictor and target MLPs", ["ssl"])
    return registry


register_blocks(default_registry)


def run_gradchecks(
    registry: BlockRegistry | None = None,
    names: list[str] | None = None,
    tolerance: float = 1e-4,
    seed: int = 0,
) -> dict[str, GradCheckReport]:
    """Finite-difference check of every (or every named) registered block."""
    if registry is None:
        registry = default_registry
    if names is None:
        names = [b.name for b in registry.list_blocks()]
    reports: dict[str, GradCheckReport] = {}
    for name in names:
        case = registry.build(name, seed)
        report = grad_check(case.model, case.inputs, case.loss_fn, tolerance=tolerance, seed=seed)
        log.info("gradcheck_block", block=name, max_error=report.max_error, passed=report.passed)
        reports[name] = report
    return reports
