"""Episodic replay storage with whole-episode eviction and K-step windows."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from bevnav.common.errors import ShapeError


@dataclass
class Episode:
    clouds: list[np.ndarray] = field(default_factory=list)
    goals: list[np.ndarray] = field(default_factory=list)
    actions: list[np.ndarray] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    dones: list[bool] = field(default_factory=list)
    terminals: list[bool] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.actions)

    @property
    def finished(self) -> bool:
        return bool(self.dones) and self.dones[-1]

    def num_windows(self, k: int) -> int:
        """Start indices ``t`` whose actions ``a_t .. a_{t+k}`` contain no done flag."""
        usable = len(self) - 1 if self.finished else len(self)
        return max(usable - k, 0)


@dataclass
class TransitionBatch:
    clouds: list[np.ndarray]
    goals: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_clouds: list[np.ndarray]
    next_goals: np.ndarray
    dones: np.ndarray
    terminals: np.ndarray


@dataclass
class WindowBatch:
    clouds: list[np.ndarray]
    actions: np.ndarray
    future_clouds: list[np.ndarray]


class ReplayBuffer:
    """Stores whole episodes. ``dones`` mark the end of an episode for any
    reason; ``terminals`` only goal and collision."""

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ShapeError(f"replay capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.episodes: deque[Episode] = deque()
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def add(
        self,
        cloud: np.ndarray,
        goal: np.ndarray,
        action: np.ndarray,
        reward: float,
        next_cloud: np.ndarray,
        next_goal: np.ndarray,
        done: bool,
        terminal: bool,
    ) -> None:
        if not self.episodes or self.episodes[-1].finished:
            self.episodes.append(Episode(clouds=[np.asarray(cloud, np.float32)], goals=[np.asarray(goal, np.float32)]))
        ep = self.episodes[-1]
        ep.actions.append(np.asarray(action, dtype=np.float32))
        ep.rewards.append(float(reward))
        ep.dones.append(bool(done))
        ep.terminals.append(bool(terminal))
        ep.clouds.append(np.asarray(next_cloud, np.float32))
        ep.goals.append(np.asarray(next_goal, np.float32))
        self._size += 1
        while self._size > self.capacity and len(self.episodes) > 1:
            self._size -= len(self.episodes.popleft())

    def clear(self) -> None:
        self.episodes.clear()
        self._size = 0

    def num_windows(self, k: int) -> int:
        return sum(ep.num_windows(k) for ep in self.episodes)

    def _locate(self, flat: np.ndarray, counts: np.ndarray) -> list[tuple[int, int]]:
        ends = np.cumsum(counts)
        eps = np.searchsorted(ends, flat, side="right")
        starts = ends - counts
        return [(int(e), int(i - starts[e])) for e, i in zip(eps, flat, strict=True)]

    def sample_transitions(self, batch_size: int, rng: np.random.Generator) -> TransitionBatch:
        if self._size == 0:
            raise ShapeError("cannot sample from an empty replay buffer")
        counts = np.array([len(ep) for ep in self.episodes])
        picks = self._locate(rng.integers(0, self._size, size=batch_size), counts)
        eps = self.episodes
        return TransitionBatch(
            clouds=[eps[e].clouds[t] for e, t in picks],
            goals=np.stack([eps[e].goals[t] for e, t in picks]),
            actions=np.stack([eps[e].actions[t] for e, t in picks]),
            rewards=np.array([eps[e].rewards[t] for e, t in picks], dtype=np.float32),
            next_clouds=[eps[e].clouds[t + 1] for e, t in picks],
            next_goals=np.stack([eps[e].goals[t + 1] for e, t in picks]),
            dones=np.array([eps[e].dones[t] for e, t in picks], dtype=np.float32),
            terminals=np.array([eps[e].terminals[t] for e, t in picks], dtype=np.float32),
        )

    def sample_windows(self, batch_size: int, k: int, rng: np.random.Generator) -> WindowBatch:
        """Windows ``(p_t, [a_t .. a_{t+k}], p_{t+k})`` that stay inside one episode."""
        counts = np.array([ep.num_windows(k) for ep in self.episodes])
        total = int(counts.sum())
        if total == 0:
            raise ShapeError(f"no complete {k}-step windows in the replay buffer")
        picks = self._locate(rng.integers(0, total, size=batch_size), counts)
        eps = self.episodes
        return WindowBatch(
            clouds=[eps[e].clouds[t] for e, t in picks],
            actions=np.stack([np.stack(eps[e].actions[t : t + k + 1]) for e, t in picks]),
            future_clouds=[eps[e].clouds[t + k] for e, t in picks],
        )
