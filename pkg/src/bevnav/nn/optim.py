from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from bevnav.common.errors import CheckpointError, GradientError
from bevnav.nn.layers import Parameter


@dataclass(frozen=True)
class StepSchedule:
    """Learning rate multiplied by ``decay`` every ``interval`` optimizer steps."""

    initial: float = 1e-3
    decay: float = 0.5
    interval: int = 10_000

    def lr_at(self, step: int) -> float:
        if self.interval <= 0:
            return self.initial
        return self.initial * self.decay ** (step // self.interval)


@dataclass
class AdamState:
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0


class Adam:
    def __init__(
        self,
        params: Sequence[Parameter],
        schedule: StepSchedule | None = None,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ) -> None:
        names = [p.name for p in params]
        if any(not n for n in names) or len(set(names)) != len(names):
            raise GradientError(f"Adam needs uniquely named parameters, got {names}")
        self.params = list(params)
        self.schedule = schedule or StepSchedule()
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.state = AdamState(
            m={p.name: np.zeros_like(p.data) for p in self.params},
            v={p.name: np.zeros_like(p.data) for p in self.params},
        )

    @property
    def lr(self) -> float:
        return self.schedule.lr_at(self.state.step)

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None

    def step(self) -> None:
        missing = [p.name for p in self.params if p.grad is None]
        if missing:
            raise GradientError(f"adam step with missing gradients: {missing}")
        lr = self.lr
        self.state.step += 1
        t = self.state.step
        correction1 = 1.0 - self.beta1**t
        correction2 = 1.0 - self.beta2**t
        for p in self.params:
            g = p.grad
            assert g is not None
            m = self.state.m[p.name]
            v = self.state.v[p.name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            m_hat = m / correction1
            v_hat = v / correction2
            p.data -= (lr * m_hat / (np.sqrt(v_hat) + self.eps)).astype(p.data.dtype)
            p.grad = None

    def export_state(self, prefix: str) -> tuple[dict[str, np.ndarray], dict[str, int]]:
        tensors: dict[str, np.ndarray] = {}
        for p in self.params:
            tensors[f"{prefix}.m.{p.name}"] = self.state.m[p.name]
            tensors[f"{prefix}.v.{p.name}"] = self.state.v[p.name]
        return tensors, {"step": self.state.step}

    def import_state(self, prefix: str, tensors: dict[str, np.ndarray], meta: dict[str, int]) -> None:
        m: dict[str, np.ndarray] = {}
        v: dict[str, np.ndarray] = {}
        for p in self.params:
            try:
                m[p.name] = tensors[f"{prefix}.m.{p.name}"].astype(p.data.dtype, copy=True)
                v[p.name] = tensors[f"{prefix}.v.{p.name}"].astype(p.data.dtype, copy=True)
            except KeyError as e:
                raise CheckpointError(f"optimizer state missing {e.args[0]}") from e
        self.state = AdamState(m=m, v=v, step=int(meta["step"]))
