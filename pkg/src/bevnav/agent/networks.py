"""Policy and value networks over (latent, goal) inputs."""
from __future__ import annotations

import math

import numpy as np

from bevnav.nn import tensor as T
from bevnav.nn.layers import MLP, Module
from bevnav.nn.tensor import Tensor

GOAL_DIM = 2
ACTION_DIM = 2
LOG2 = math.log(2.0)
HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
# emitted actions stay strictly inside the action box
SQUASH_LIMIT = 1.0 - 1e-6

_ACTION_SCALE = np.array([0.5, 1.0], dtype=np.float32)
_ACTION_SHIFT = np.array([0.5, 0.0], dtype=np.float32)


def goal_features(distance: np.ndarray | float, bearing: np.ndarray | float, arena_diagonal: float) -> np.ndarray:
    """``(d / arena diagonal, bearing / pi)`` as float32 rows."""
    d = np.atleast_1d(np.asarray(distance, dtype=np.float64))
    b = np.atleast_1d(np.asarray(bearing, dtype=np.float64))
    return np.stack([d / arena_diagonal, b / math.pi], axis=1).astype(np.float32)


def squash(u: np.ndarray) -> np.ndarray:
    """Map pre-squash samples to ``v in (0, 1)``, ``omega in (-1, 1)``."""
    s = np.clip(np.tanh(u), -SQUASH_LIMIT, SQUASH_LIMIT)
    return (s * _ACTION_SCALE + _ACTION_SHIFT).astype(np.float32)


def tanh_log_det(u: Tensor) -> Tensor:
    """``log(1 - tanh(u)^2)`` in the overflow-free form ``2 (log 2 - u - softplus(-2u))``."""
    return 2.0 * (LOG2 - u - T.softplus(-2.0 * u))


class Actor(Module):
    """Gaussian policy squashed by tanh; ``v`` is rescaled from (-1, 1) to (0, 1)."""

    def __init__(
        self,
        latent_dim: int,
        rng: np.random.Generator,
        hidden: int = 256,
        log_std_min: float = -20.0,
        log_std_max: float = 2.0,
    ) -> None:
        self.log_std_min = log_std_min
        self.log_std_max = log_std_max
        self.mlp = MLP([latent_dim + GOAL_DIM, hidden, hidden, 2 * ACTION_DIM], rng)

    def forward(self, latent: Tensor, goal: np.ndarray) -> tuple[Tensor, Tensor]:
        out = self.mlp(T.concat([latent, Tensor(goal, dtype=latent.dtype)], axis=1))
        mean = out[:, :ACTION_DIM]
        log_std = T.clip(out[:, ACTION_DIM:], self.log_std_min, self.log_std_max)
        return mean, log_std

    def rsample(self, latent: Tensor, goal: np.ndarray, noise: np.ndarray) -> tuple[Tensor, Tensor]:
        """Reparameterized action and its log-density for standard-normal ``noise``.

        The log-density includes the tanh change of variables and the factor
        1/2 of the ``v`` rescaling.
        """
        mean, log_std = self(latent, goal)
        eps = np.asarray(noise, dtype=mean.dtype)
        u = mean + T.exp(log_std) * eps
        gauss = -0.5 * eps * eps - HALF_LOG_2PI
        log_prob = T.sum(gauss - log_std - tanh_log_det(u), axis=1) - math.log(0.5)
        action = T.tanh(u) * _ACTION_SCALE.astype(mean.dtype) + _ACTION_SHIFT.astype(mean.dtype)
        return action, log_prob

    def sample(
        self,
        latent: Tensor,
        goal: np.ndarray,
        rng: np.random.Generator,
        deterministic: bool = False,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Numpy action (B, 2) and log-probability (B,) without recording gradients."""
        mean, log_std = self(latent, goal)
        noise = np.zeros(mean.shape) if deterministic else rng.standard_normal(mean.shape)
        mu = mean.data.astype(np.float64)
        ls = log_std.data.astype(np.float64)
        u = mu + np.exp(ls) * noise
        log_det = 2.0 * (LOG2 - u - np.logaddexp(0.0, -2.0 * u))
        log_prob = (-0.5 * noise * noise - HALF_LOG_2PI - ls - log_det).sum(axis=1) - math.log(0.5)
        return squash(u), log_prob


class QNetwork(Module):
    def __init__(self, latent_dim: int, rng: np.random.Generator, hidden: int = 256) -> None:
        self.mlp = MLP([latent_dim + GOAL_DIM + ACTION_DIM, hidden, hidden, 1], rng)

    def forward(self, latent: Tensor, goal: np.ndarray, action: Tensor | np.ndarray) -> Tensor:
        if not isinstance(action, Tensor):
            action = Tensor(action, dtype=latent.dtype)
        x = T.concat([latent, Tensor(goal, dtype=latent.dtype), action], axis=1)
        return T.reshape(self.mlp(x), (x.shape[0],))


class TwinCritic(Module):
    def __init__(self, latent_dim: int, rng: np.random.Generator, hidden: int = 256) -> None:
        self.q1 = QNetwork(latent_dim, rng, hidden)
        self.q2 = QNetwork(latent_dim, rng, hidden)

    def forward(self, latent: Tensor, goal: np.ndarray, action: Tensor | np.ndarray) -> tuple[Tensor, Tensor]:
        return self.q1(latent, goal, action), self.q2(latent, goal, action)

    def min_q(self, latent: Tensor, goal: np.ndarray, action: Tensor | np.ndarray) -> Tensor:
        q1, q2 = self(latent, goal, action)
        return T.minimum(q1, q2)


def polyak_update(target: Module, online: Module, tau: float) -> None:
    """``target <- tau * online + (1 - tau) * target`` parameter-wise."""
    online_params = dict(online.named_parameters())
    for name, p in target.named_parameters():
        src = online_params[name].data
        p.data = (tau * src + (1.0 - tau) * p.data).astype(p.data.dtype)
