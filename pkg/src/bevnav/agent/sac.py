"""Soft actor-critic over BEV latents with spatial and temporal auxiliary losses.

Gradient routing: the critic loss and the auxiliary losses update the shared
encoder; the actor sees a detached latent. Critic targets use next-state
latents from the online encoder under stop-gradient.
"""
from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np

from bevnav.agent.config import TrainConfig
from bevnav.agent.networks import Actor, TwinCritic, goal_features, polyak_update
from bevnav.agent.replay import ReplayBuffer, TransitionBatch, WindowBatch
from bevnav.bev.cloud import PointCloud
from bevnav.bev.encoder import EncoderConfig, SparseDenseBEVNet, encode_batch
from bevnav.bev.pillars import PillarConfig
from bevnav.common.errors import CheckpointError
from bevnav.common.logging import get_logger
from bevnav.nn import tensor as T
from bevnav.nn.checkpoint import load_tensors, save_tensors
from bevnav.nn.layers import Module, Parameter
from bevnav.nn.optim import Adam
from bevnav.nn.tensor import Tape, Tensor
from bevnav.sim.world import Observation
from bevnav.ssl.augment import AugmentConfig
from bevnav.ssl.spatial import SpatialContrastiveHead, scl_loss
from bevnav.ssl.temporal import TemporalContrastiveHead, tcl_loss

log = get_logger("bevnav.agent.sac")

CHECKPOINT_KIND = "sac_agent"


def _clouds(arrays: Sequence[np.ndarray]) -> list[PointCloud]:
    return [PointCloud(a) for a in arrays]


class SACAgent:
    def __init__(
        self,
        cfg: TrainConfig,
        pillars: PillarConfig,
        encoder_cfg: EncoderConfig,
        arena_diagonal: float,
        seed: int = 0,
        config_hash: str = "",
    ) -> None:
        self.cfg = cfg
        self.pillars = pillars
        self.encoder_cfg = encoder_cfg
        self.arena_diagonal = float(arena_diagonal)
        self.config_hash = config_hash
        init_rng = np.random.default_rng(seed)
        self.rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
        latent = encoder_cfg.latent_dim

        self.encoder = SparseDenseBEVNet(encoder_cfg, init_rng)
        self.actor = Actor(latent, init_rng, cfg.hidden, cfg.log_std_min, cfg.log_std_max)
        self.critic = TwinCritic(latent, init_rng, cfg.hidden)
        self.critic_target = self.critic.copy()
        self.scl_head = SpatialContrastiveHead(init_rng, latent_dim=latent) if cfg.enable_scl else None
        self.tcl_head = (
            TemporalContrastiveHead(cfg.window, init_rng, latent_dim=latent, temperature=cfg.tcl_temperature)
            if cfg.tcl_active
            else None
        )
        self.log_alpha = Parameter(np.array(np.log(cfg.init_alpha), dtype=np.float32), name="log_alpha")
        for prefix, module in self.modules().items():
            module.assign_names(prefix)

        schedule = cfg.schedule()
        self.critic_opt = Adam(self.critic.parameters() + self.encoder.parameters(), schedule)
        self.actor_opt = Adam(self.actor.parameters(), schedule)
        self.alpha_opt = Adam([self.log_alpha], schedule)
        self.aux_opt = Adam(self.aux_parameters(), schedule) if cfg.ssl_active else None

        self.buffer = ReplayBuffer(cfg.buffer_capacity)
        self.augment_cfg = AugmentConfig(shift=cfg.augment_shift)
        self.updates = 0

    # ------------------------------------------------------------------
    # parameters
    # ------------------------------------------------------------------

    def modules(self) -> dict[str, Module]:
        mods: dict[str, Module] = {
            "encoder": self.encoder,
            "actor": self.actor,
            "critic": self.critic,
            "critic_target": self.critic_target,
        }
        if self.scl_head is not None:
            mods["scl"] = self.scl_head
        if self.tcl_head is not None:
            mods["tcl"] = self.tcl_head
        return mods

    def aux_parameters(self) -> list[Parameter]:
        params = self.encoder.parameters()
        if self.scl_head is not None:
            params += self.scl_head.parameters()
        if self.tcl_head is not None:
            params += self.tcl_head.parameters()
        return params

    def optimizers(self) -> dict[str, Adam]:
        opts = {"critic": self.critic_opt, "actor": self.actor_opt, "alpha": self.alpha_opt}
        if self.aux_opt is not None:
            opts["aux"] = self.aux_opt
        return opts

    @property
    def alpha(self) -> float:
        return float(np.exp(self.log_alpha.data))

    def _zero_grads(self) -> None:
        for module in self.modules().values():
            module.zero_grad()
        self.log_alpha.grad = None

    # ------------------------------------------------------------------
    # acting
    # ------------------------------------------------------------------

    def featurize_goal(self, distance: float, bearing: float) -> np.ndarray:
        return goal_features(distance, bearing, self.arena_diagonal)[0]

    def encode(self, clouds: Sequence[np.ndarray] | Sequence[PointCloud]) -> Tensor:
        batch = [c if isinstance(c, PointCloud) else PointCloud(c) for c in clouds]
        _, latent = encode_batch(batch, self.pillars, self.encoder)
        return latent

    def act(self, obs: Observation, deterministic: bool = False) -> np.ndarray:
        """``(v, omega)`` strictly inside (0, 1) x (-1, 1)."""
        latent = self.encode([obs.cloud])
        goal = self.featurize_goal(obs.goal_distance, obs.goal_bearing)[None]
        action, _ = self.actor.sample(latent, goal, self.rng, deterministic)
        return action[0]

    # ------------------------------------------------------------------
    # updates
    # ------------------------------------------------------------------

    def critic_targets(self, batch: TransitionBatch) -> np.ndarray:
        """``y = r + gamma * (1 - done) * (min Q'(s', a') - alpha * log pi(a'|s'))``."""
        next_latent = self.encode(batch.next_clouds)
        next_action, next_logp = self.actor.sample(next_latent, batch.next_goals, self.rng)
        q_next = self.critic_target.min_q(next_latent, batch.next_goals, next_action).data
        mask = batch.dones
        soft_q = q_next.astype(np.float64) - self.alpha * next_logp
        y = batch.rewards.astype(np.float64) + self.cfg.gamma * (1.0 - mask) * soft_q
        return y.astype(np.float32)

    def critic_update(self, batch: TransitionBatch) -> float:
        y = self.critic_targets(batch)
        self._zero_grads()
        with Tape() as tape:
            latent = self.encode(batch.clouds)
            q1, q2 = self.critic(latent, batch.goals, batch.actions)
            loss = T.mean(T.square(q1 - y)) + T.mean(T.square(q2 - y))
        tape.backward(loss, params=self.critic_opt.params)
        self.critic_opt.step()
        return loss.item()

    def actor_update(self, batch: TransitionBatch) -> tuple[float, np.ndarray]:
        """Returns the actor loss and the detached log-probabilities for the alpha step."""
        latent = self.encode(batch.clouds).detach()
        noise = self.rng.standard_normal((len(batch.clouds), 2))
        self._zero_grads()
        with Tape() as tape:
            action, log_prob = self.actor.rsample(latent, batch.goals, noise)
            q = self.critic.min_q(latent, batch.goals, action)
            loss = T.mean(self.alpha * log_prob - q)
        tape.backward(loss, params=self.actor_opt.params)
        self.actor_opt.step()
        return loss.item(), log_prob.data.copy()

    def alpha_update(self, log_prob: np.ndarray) -> float:
        """Gradient step on ``-log_alpha * (log_pi + target_entropy)``."""
        self._zero_grads()
        shifted = (log_prob + self.cfg.target_entropy).astype(self.log_alpha.dtype)
        with Tape() as tape:
            loss = -T.mean(self.log_alpha * shifted)
        tape.backward(loss, params=[self.log_alpha])
        self.alpha_opt.step()
        return self.alpha

    def aux_losses(self, batch: TransitionBatch, windows: WindowBatch | None) -> tuple[Tensor, dict[str, float]]:
        parts: dict[str, float] = {}
        total: Tensor | None = None
        if self.scl_head is not None:
            l_sc = scl_loss(
                _clouds(batch.clouds), self.encoder, self.pillars, self.scl_head, self.rng, self.augment_cfg
            )
            parts["L_sc"] = l_sc.item()
            total = self.cfg.lambda_sc * l_sc
        if self.tcl_head is not None and windows is not None:
            l_tc = tcl_loss(
                _clouds(windows.clouds),
                windows.actions,
                _clouds(windows.future_clouds),
                self.encoder,
                self.pillars,
                self.tcl_head,
            )
            parts["L_tc"] = l_tc.item()
            weighted = self.cfg.lambda_tc * l_tc
            total = weighted if total is None else total + weighted
        assert total is not None
        return total, parts

    def aux_update(self, batch: TransitionBatch, windows: WindowBatch | None) -> dict[str, float]:
        if self.aux_opt is None:
            return {}
        self._zero_grads()
        with Tape() as tape:
            total, parts = self.aux_losses(batch, windows)
        tape.backward(total, params=self.aux_opt.params)
        self.aux_opt.step()
        return parts

    def soft_update(self) -> None:
        polyak_update(self.critic_target, self.critic, self.cfg.tau)

    def ready(self) -> bool:
        cfg = self.cfg
        if len(self.buffer) < cfg.batch_size * (cfg.window + 1):
            return False
        if self.tcl_head is not None and self.buffer.num_windows(cfg.window) < cfg.batch_size:
            return False
        return True

    def train_step(self) -> dict[str, float] | None:
        """One update: critic, actor, alpha, auxiliary, then target sync.

        Returns ``None`` (and logs a notice) when the buffer is too small.
        """
        if not self.ready():
            log.info("train_step_skipped", buffer=len(self.buffer), batch_size=self.cfg.batch_size)
            return None
        batch = self.buffer.sample_transitions(self.cfg.batch_size, self.rng)
        windows = (
            self.buffer.sample_windows(self.cfg.batch_size, self.cfg.window, self.rng)
            if self.tcl_head is not None
            else None
        )
        critic_loss = self.critic_update(batch)
        actor_loss, log_prob = self.actor_update(batch)
        alpha = self.alpha_update(log_prob)
        metrics: dict[str, float] = {}
        metrics.update(self.aux_update(batch, windows))
        self.soft_update()
        self.updates += 1
        metrics.update(
            {
                "step": float(self.updates),
                "critic_loss": critic_loss,
                "actor_loss": actor_loss,
                "alpha": alpha,
                "entropy": float(-log_prob.mean()),
            }
        )
        return metrics

    # ------------------------------------------------------------------
    # checkpoints
    # ------------------------------------------------------------------

    def export_state(self) -> tuple[dict[str, np.ndarray], dict[str, Any]]:
        tensors: dict[str, np.ndarray] = {}
        for module in self.modules().values():
            for name, p in module.named_parameters():
                tensors[p.name or name] = p.data
        tensors[self.log_alpha.name] = self.log_alpha.data
        opt_meta: dict[str, Any] = {}
        for key, opt in self.optimizers().items():
            t, m = opt.export_state(f"opt.{key}")
            tensors.update(t)
            opt_meta[key] = m
        meta = {
            "kind": CHECKPOINT_KIND,
            "config_hash": self.config_hash,
            "updates": self.updates,
            "optimizers": opt_meta,
            "train": self.cfg.model_dump(mode="json"),
            "rng": self.rng.bit_generator.state,
        }
        return tensors, meta

    def save(self, path: str | Path, extra_meta: dict[str, Any] | None = None) -> Path:
        tensors, meta = self.export_state()
        if extra_meta:
            meta["extra"] = extra_meta
        out = save_tensors(path, tensors, meta)
        log.info("checkpoint_saved", path=str(out), updates=self.updates, tensors=len(tensors))
        return out

    def load(self, path: str | Path) -> dict[str, Any]:
        """Restore parameters, optimizer moments, alpha and counters.

        A checkpoint written under a different configuration hash still loads,
        with a warning. Returns the checkpoint metadata.
        """
        tensors, meta = load_tensors(path)
        saved_hash = meta.get("config_hash", "")
        if saved_hash != self.config_hash:
            log.warning("config_hash_mismatch", path=str(path), checkpoint=saved_hash, current=self.config_hash)
        states: dict[str, dict[str, np.ndarray]] = {}
        for prefix, module in self.modules().items():
            names = {name for name, _ in module.named_parameters(prefix)}
            states[prefix] = {
                name[len(prefix) + 1 :]: tensors[name] for name in names if name in tensors
            }
        if "log_alpha" not in tensors:
            raise CheckpointError("checkpoint has no log_alpha")
        opt_meta = meta.get("optimizers", {})
        for key, opt in self.optimizers().items():
            missing = [p.name for p in opt.params if f"opt.{key}.m.{p.name}" not in tensors]
            if key not in opt_meta or missing:
                raise CheckpointError(f"optimizer state {key!r} incomplete in {path}")
        # validate everything before mutating any state
        for prefix, module in self.modules().items():
            staged = module.copy()
            staged.load_state_dict(states[prefix])
        for prefix, module in self.modules().items():
            module.load_state_dict(states[prefix])
        self.log_alpha.data = tensors["log_alpha"].astype(np.float32).reshape(())
        for key, opt in self.optimizers().items():
            opt.import_state(f"opt.{key}", tensors, opt_meta[key])
        self.updates = int(meta.get("updates", 0))
        if "rng" in meta:
            self.rng.bit_generator.state = meta["rng"]
        log.info("checkpoint_loaded", path=str(path), updates=self.updates)
        return meta
