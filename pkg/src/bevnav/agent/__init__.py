"""Soft actor-critic agent with auxiliary contrastive objectives."""

from bevnav.agent.config import TrainConfig
from bevnav.agent.networks import Actor, QNetwork, TwinCritic, goal_features, polyak_update
from bevnav.agent.replay import Episode, ReplayBuffer, TransitionBatch, WindowBatch
from bevnav.agent.sac import SACAgent

__all__ = [
    "TrainConfig",
    "Actor", "QNetwork", "TwinCritic", "goal_features", "polyak_update",
    "Episode", "ReplayBuffer", "TransitionBatch", "WindowBatch",
    "SACAgent",
]
