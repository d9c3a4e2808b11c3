"""Evaluation: optimal path lengths, episode suites, SR / Velocity / SPL / Reward."""

from bevnav.evaluation.harness import (
    AgentPolicy,
    GoalSeekingPolicy,
    Policy,
    RandomPolicy,
    run_episode,
    run_suite,
)
from bevnav.evaluation.metrics import (
    EpisodeRecord,
    MetricsReport,
    compute_spl,
    compute_sr,
    compute_velocity,
    mean_reward,
    summarize,
)
from bevnav.evaluation.planner import OccupancyGrid, PathPlan, astar, optimal_path_length, plan_path
from bevnav.evaluation.report import evaluate, write_episodes_csv, write_metrics_csv
from bevnav.evaluation.sweeps import ABLATION_VARIANTS, ablate, sweep_window, train_and_evaluate

__all__ = [
    "Policy", "RandomPolicy", "GoalSeekingPolicy", "AgentPolicy", "run_episode", "run_suite",
    "EpisodeRecord", "MetricsReport", "compute_sr", "compute_spl", "compute_velocity",
    "mean_reward", "summarize",
    "OccupancyGrid", "PathPlan", "astar", "optimal_path_length", "plan_path",
    "evaluate", "write_metrics_csv", "write_episodes_csv",
    "ABLATION_VARIANTS", "ablate", "sweep_window", "train_and_evaluate",
]
