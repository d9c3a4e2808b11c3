"""Suite orchestration over pedestrian settings plus the metrics/episodes CSV writers."""
from __future__ import annotations

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path

from bevnav.common.config import RunConfig
from bevnav.common.logging import get_logger
from bevnav.evaluation.harness import Policy, run_suite
from bevnav.evaluation.metrics import EpisodeRecord, MetricsReport, summarize
from bevnav.sim.spec import WorldSpec

log = get_logger("bevnav.evaluation.report")

METRICS_COLUMNS = ["scenario", "peds", "SR", "Velocity", "SPL", "Reward", "N", "config_hash", "seed"]
EPISODE_COLUMNS = [
    "scenario", "peds", "seed", "outcome", "success", "path_length",
    "optimal_length", "mean_velocity", "reward", "steps",
]


def write_metrics_csv(
    path: str | Path, reports: Iterable[MetricsReport], config_hash: str, seed: int
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=METRICS_COLUMNS)
        writer.writeheader()
        for report in reports:
            writer.writerow({**report.as_row(), "config_hash": config_hash, "seed": seed})
    return path


def write_episodes_csv(
    path: str | Path, groups: Iterable[tuple[str, int, Sequence[EpisodeRecord]]]
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=EPISODE_COLUMNS)
        writer.writeheader()
        for scenario, peds, records in groups:
            for record in records:
                writer.writerow({"scenario": scenario, "peds": peds, **record.as_row()})
    return path


def evaluate(
    cfg: RunConfig,
    policy: Policy,
    out_dir: str | Path,
    world: WorldSpec | None = None,
    pedestrians: Sequence[int] | None = None,
    traces: bool = False,
    config_hash: str | None = None,
    use_ray: bool | None = None,
) -> list[MetricsReport]:
    """One suite per pedestrian count; writes ``metrics.csv`` and ``episodes.csv``.

    ``config_hash`` defaults to the hash of ``cfg``; pass the training hash when
    evaluating a checkpoint under a different scenario.
    """
    out = Path(out_dir)
    world = world or cfg.world_spec()
    counts = list(pedestrians if pedestrians is not None else cfg.eval.pedestrians)
    ev = cfg.eval
    reports: list[MetricsReport] = []
    groups: list[tuple[str, int, list[EpisodeRecord]]] = []
    for peds in counts:
        scenario = world.with_pedestrians(peds)
        records = run_suite(
            policy,
            scenario,
            episodes=ev.episodes,
            seed0=ev.seed0,
            sim=cfg.sim,
            reward=cfg.reward,
            resolution=ev.grid_resolution,
            smooth=ev.smooth_paths,
            trace_dir=out / "traces" / f"{scenario.name}_peds{peds}" if traces else None,
            use_ray=use_ray,
        )
        if not records:
            log.warning("suite_empty", scenario=scenario.name, pedestrians=peds)
            continue
        report = summarize(records, scenario.name, peds, ev.velocity_mode)
        log.info("suite_metrics", **report.as_row())
        reports.append(report)
        groups.append((scenario.name, peds, records))
    write_metrics_csv(out / "metrics.csv", reports, config_hash or cfg.config_hash(), cfg.seed)
    write_episodes_csv(out / "episodes.csv", groups)
    return reports
