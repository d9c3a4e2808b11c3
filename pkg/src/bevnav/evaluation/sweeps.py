"""Train-then-evaluate experiments: prediction-window sweep and SSL ablation."""
from __future__ import annotations

import csv
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from bevnav.agent.config import TrainConfig
from bevnav.agent.trainer import Trainer
from bevnav.common.config import RunConfig
from bevnav.common.errors import ConfigError
from bevnav.common.logging import get_logger
from bevnav.common.utils import format_validation_error
from bevnav.evaluation.harness import AgentPolicy
from bevnav.evaluation.metrics import MetricsReport
from bevnav.evaluation.report import evaluate
from bevnav.kernel import parallel_map

log = get_logger("bevnav.evaluation.sweeps")

METRIC_KEYS = ["SR", "Velocity", "SPL", "Reward"]
SWEEP_COLUMNS = ["K", "seed", "scenario", "peds", *METRIC_KEYS, "N", "config_hash"]
ABLATION_COLUMNS = ["variant", "scenario", "peds", *METRIC_KEYS, "N", "config_hash", "seed"]

# SAC-B, the CURL-style spatial-only baseline, and the full method
ABLATION_VARIANTS: dict[str, dict[str, bool]] = {
    "sac_b": {"enable_scl": False, "enable_tcl": False},
    "curl_b": {"enable_scl": True, "enable_tcl": False},
    "full": {"enable_scl": True, "enable_tcl": True},
}


def with_train(cfg: RunConfig, **updates: Any) -> RunConfig:
    try:
        train = TrainConfig.model_validate({**cfg.train.model_dump(), **updates})
    except ValidationError as e:
        raise ConfigError(format_validation_error(e, prefix="train")) from e
    return cfg.model_copy(update={"train": train})


def with_scenario(cfg: RunConfig, scenario: str) -> RunConfig:
    if scenario == cfg.scenario and cfg.world is None:
        return cfg
    return cfg.model_copy(update={"scenario": scenario, "world": None})


def train_and_evaluate(
    cfg: RunConfig,
    out_dir: str | Path,
    scenarios: Sequence[str] | None = None,
    use_ray: bool | None = None,
) -> list[MetricsReport]:
    """Train one agent, then evaluate it on each scenario (the training one by default)."""
    out = Path(out_dir)
    trainer = Trainer(cfg, out)
    trainer.run()
    policy = AgentPolicy(trainer.agent)
    reports: list[MetricsReport] = []
    for name in scenarios or [cfg.scenario]:
        eval_cfg = with_scenario(cfg, name)
        reports.extend(
            evaluate(eval_cfg, policy, out / "eval" / name, config_hash=cfg.config_hash(), use_ray=use_ray)
        )
    return reports


def _write_rows(path: Path, columns: list[str], rows: list[dict[str, Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)
    return path


def _sweep_job(job: tuple[int, int], base: RunConfig, out_dir: Path) -> list[dict[str, Any]]:
    window, seed = job
    cfg = with_train(base, window=window).model_copy(update={"seed": seed})
    # nested fan-out stays sequential inside a worker
    reports = train_and_evaluate(cfg, out_dir / f"K{window}_seed{seed}", use_ray=False)
    return [
        {**r.as_row(), "K": window, "seed": seed, "config_hash": cfg.config_hash()}
        for r in reports
    ]


def sweep_window(
    base: RunConfig,
    windows: Sequence[int],
    seeds: Sequence[int],
    out_dir: str | Path,
    use_ray: bool | None = None,
) -> list[dict[str, Any]]:
    """One run per (K, seed); every K sees the same seeds so comparisons are paired.

    Writes ``sweep_k.csv`` with a row per run plus a ``seed=mean`` row per
    (K, scenario, peds).
    """
    out = Path(out_dir)
    jobs = [(int(k), int(s)) for k in windows for s in seeds]
    per_run = parallel_map(_sweep_job, jobs, use_ray=use_ray, base=base, out_dir=out)
    rows = [row for run in per_run for row in run]
    means = []
    for k in windows:
        keys = sorted({(r["scenario"], r["peds"]) for r in rows if r["K"] == k})
        for scenario, peds in keys:
            group = [r for r in rows if r["K"] == k and r["scenario"] == scenario and r["peds"] == peds]
            means.append(
                {
                    "K": k,
                    "seed": "mean",
                    "scenario": scenario,
                    "peds": peds,
                    **{m: round(float(np.mean([r[m] for r in group])), 4) for m in METRIC_KEYS},
                    "N": sum(r["N"] for r in group),
                    "config_hash": with_train(base, window=k).config_hash(),
                }
            )
    table = rows + means
    _write_rows(out / "sweep_k.csv", SWEEP_COLUMNS, table)
    log.info("sweep_finished", runs=len(jobs), rows=len(table))
    return table


def ablate(
    base: RunConfig,
    out_dir: str | Path,
    eval_scenarios: Sequence[str] = ("square", "lobby"),
    variants: Sequence[str] | None = None,
) -> list[dict[str, Any]]:
    """Train each SSL variant on the base scenario and evaluate it on seen and unseen worlds."""
    out = Path(out_dir)
    rows: list[dict[str, Any]] = []
    for name in variants or list(ABLATION_VARIANTS):
        cfg = with_train(base, **ABLATION_VARIANTS[name])
        log.info("ablation_variant", variant=name, config_hash=cfg.config_hash())
        for report in train_and_evaluate(cfg, out / name, eval_scenarios):
            rows.append({**report.as_row(), "variant": name, "config_hash": cfg.config_hash(), "seed": cfg.seed})
    _write_rows(out / "ablation.csv", ABLATION_COLUMNS, rows)
    return rows
