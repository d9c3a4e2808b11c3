"""Environment rollout interleaved with SAC updates, training CSV and checkpoints."""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Any

import numpy as np

from bevnav.agent.sac import SACAgent
from bevnav.common.config import RunConfig, dump_run_config
from bevnav.common.errors import CheckpointError
from bevnav.common.logging import get_logger
from bevnav.nn.checkpoint import load_tensors
from bevnav.sim.world import NavWorld, Observation

log = get_logger("bevnav.agent.trainer")

CSV_COLUMNS = ["step", "L_sc", "L_tc", "critic_loss", "actor_loss", "alpha"]


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.8g}"


class TrainingLog:
    """Append-only CSV; a comment header carries the run identity.

    Opened with ``resume_step``, rows logged after that step by an earlier run
    are dropped so the resumed run does not repeat them.
    """

    def __init__(self, path: Path, config_hash: str, seed: int, resume_step: int | None = None) -> None:
        self.path = path
        path.parent.mkdir(parents=True, exist_ok=True)
        fresh = resume_step is None or not path.exists()
        if not fresh:
            assert resume_step is not None
            self._truncate(resume_step)
        self._file = open(path, "w" if fresh else "a", newline="", encoding="utf-8")  # noqa: SIM115
        self._writer = csv.writer(self._file)
        if fresh:
            self._file.write(f"# config_hash={config_hash} seed={seed}\n")
            self._writer.writerow(CSV_COLUMNS)

    def _truncate(self, resume_step: int) -> None:
        with open(self.path, newline="", encoding="utf-8") as f:
            lines = f.readlines()
        kept: list[str] = []
        dropped = 0
        for line in lines:
            head = line.split(",", 1)[0].strip()
            if head.isdigit() and int(head) > resume_step:
                dropped += 1
                continue
            kept.append(line)
        if dropped:
            with open(self.path, "w", newline="", encoding="utf-8") as f:
                f.writelines(kept)
            log.info("training_log_truncated", path=str(self.path), after_step=resume_step, rows=dropped)

    def write(self, step: int, metrics: dict[str, float]) -> None:
        self._writer.writerow(
            [step, *(_fmt(metrics.get(col)) for col in CSV_COLUMNS[1:])]
        )
        self._file.flush()

    def close(self) -> None:
        self._file.close()


def build_agent(cfg: RunConfig) -> SACAgent:
    return SACAgent(
        cfg.train,
        cfg.pillars,
        cfg.encoder,
        arena_diagonal=cfg.arena_diagonal(),
        seed=cfg.seed,
        config_hash=cfg.config_hash(),
    )


class Trainer:
    """Runs ``cfg.steps`` environment steps.

    The first ``warmup_steps`` actions are uniform random; afterwards the
    policy samples actions and every step triggers ``updates_per_step`` updates
    once the replay buffer can fill a batch.
    """

    def __init__(self, cfg: RunConfig, out_dir: str | Path) -> None:
        self.cfg = cfg
        self.out_dir = Path(out_dir)
        self.config_hash = cfg.config_hash()
        self.agent = build_agent(cfg)
        self.world = NavWorld(cfg.world_spec(), cfg.sim, cfg.reward)
        seeds = np.random.SeedSequence(cfg.seed).spawn(2)
        self.episode_rng = np.random.default_rng(seeds[0])
        self.action_rng = np.random.default_rng(seeds[1])
        self.step = 0
        self.episodes = 0

    @property
    def train_csv(self) -> Path:
        return self.out_dir / "train.csv"

    @property
    def checkpoint_dir(self) -> Path:
        return self.out_dir / "checkpoints"

    def _next_episode(self) -> Observation:
        seed = int(self.episode_rng.integers(0, 2**31 - 1))
        self.episodes += 1
        return self.world.reset(seed)

    def _run_meta(self) -> dict[str, Any]:
        return {
            "seed": self.cfg.seed,
            "run_config": self.cfg.model_dump(mode="json"),
            "step": self.step,
            "episodes": self.episodes,
            "episode_rng": self.episode_rng.bit_generator.state,
            "action_rng": self.action_rng.bit_generator.state,
        }

    def save_checkpoint(self, path: Path) -> Path:
        return self.agent.save(path, extra_meta=self._run_meta())

    def resume(self, checkpoint: str | Path) -> None:
        """Restore agent state, counters and RNG streams. The replay buffer restarts empty."""
        meta = self.agent.load(checkpoint)
        run = meta.get("extra")
        if not run:
            raise CheckpointError(f"{checkpoint} carries no training state")
        self.step = int(run["step"])
        self.episodes = int(run["episodes"])
        self.episode_rng.bit_generator.state = run["episode_rng"]
        self.action_rng.bit_generator.state = run["action_rng"]
        log.info("training_resumed", checkpoint=str(checkpoint), step=self.step)

    def run(self, resume_from: str | Path | None = None) -> Path:
        cfg, tcfg, agent = self.cfg, self.cfg.train, self.agent
        if resume_from is not None:
            self.resume(resume_from)
        dump_run_config(cfg, self.out_dir / "config.json")
        train_log = TrainingLog(
            self.train_csv, self.config_hash, cfg.seed, resume_step=self.step if resume_from is not None else None
        )
        log.info(
            "training_started",
            steps=cfg.steps,
            start_step=self.step,
            scenario=self.world.spec.name,
            scl=tcfg.enable_scl,
            tcl=tcfg.tcl_active,
            window=tcfg.window,
        )
        obs = self._next_episode()
        goal = agent.featurize_goal(obs.goal_distance, obs.goal_bearing)
        try:
            while self.step < cfg.steps:
                if self.step < tcfg.warmup_steps:
                    action = np.array(
                        [self.action_rng.uniform(0.0, 1.0), self.action_rng.uniform(-1.0, 1.0)],
                        dtype=np.float32,
                    )
                else:
                    action = agent.act(obs)
                result = self.world.step(action)
                nxt = result.observation
                next_goal = agent.featurize_goal(nxt.goal_distance, nxt.goal_bearing)
                agent.buffer.add(
                    obs.cloud.points,
                    goal,
                    np.array([self.world.robot.v, self.world.robot.omega], dtype=np.float32),
                    result.reward,
                    nxt.cloud.points,
                    next_goal,
                    done=result.done,
                    terminal=result.outcome in ("goal", "collision"),
                )
                self.step += 1
                if self.step > tcfg.warmup_steps:
                    for _ in range(tcfg.updates_per_step):
                        metrics = agent.train_step()
                        if metrics is not None and agent.updates % cfg.log_every == 0:
                            train_log.write(self.step, metrics)
                if result.done:
                    stats = self.world.stats
                    log.info(
                        "episode_done",
                        episode=self.episodes,
                        step=self.step,
                        outcome=result.outcome,
                        reward=round(stats.total_reward, 3),
                        length=stats.steps,
                    )
                    obs = self._next_episode()
                    goal = agent.featurize_goal(obs.goal_distance, obs.goal_bearing)
                else:
                    obs, goal = nxt, next_goal
                if cfg.checkpoint_every and self.step % cfg.checkpoint_every == 0:
                    self.save_checkpoint(self.checkpoint_dir / f"step_{self.step:08d}.ckpt")
        finally:
            train_log.close()
        final = self.save_checkpoint(self.out_dir / "final.ckpt")
        log.info("training_finished", step=self.step, updates=agent.updates, checkpoint=str(final))
        return final


def read_checkpoint_meta(path: str | Path) -> dict[str, Any]:
    """Training metadata stored alongside the agent state (run config, counters)."""
    _, meta = load_tensors(path)
    return dict(meta.get("extra") or {})
