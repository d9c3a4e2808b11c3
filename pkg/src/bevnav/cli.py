"""``bevnav`` command line: train, eval, sweep-k, ablate, inspect, gradcheck."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

import structlog

from bevnav.common.config import RunConfig, deep_merge, load_run_config
from bevnav.common.errors import BevNavError, ConfigError
from bevnav.common.logging import configure_logging, get_logger
from bevnav.common.settings import get_settings
from bevnav.nn.tensor import set_finite_checks

log = get_logger("bevnav.cli")


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=str, default=None, help="JSON or YAML run configuration")
    p.add_argument("--profile", choices=["desk", "paper"], default=None)
    p.add_argument("--scenario", type=str, default=None, help="empty | square | lobby")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=str, default=None, help="Output directory (default: $BEVNAV_OUTPUT_ROOT/...)")


def _add_train_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--steps", type=int, default=None, help="Environment steps")
    p.add_argument("--window", type=int, default=None, help="Temporal prediction window K")
    p.add_argument("--no-scl", action="store_true", help="Disable spatial contrastive learning")
    p.add_argument("--no-tcl", action="store_true", help="Disable temporal contrastive learning")


def _add_eval_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--episodes", type=int, default=None, help="Evaluation episodes per setting")
    p.add_argument("--peds", type=_int_list, default=None, help="Pedestrian counts, e.g. 0,5,10")


def _parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="bevnav", description="BEV point-cloud navigation lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="Train an agent")
    _add_run_options(p)
    _add_train_options(p)
    p.add_argument("--resume", type=str, default=None, help="Checkpoint to continue from")

    p = sub.add_parser("eval", help="Evaluate a checkpoint")
    _add_run_options(p)
    _add_eval_options(p)
    p.add_argument("--checkpoint", type=str, required=True)
    p.add_argument("--traces", action="store_true", help="Write one trace CSV per episode")

    p = sub.add_parser("sweep-k", help="Train and evaluate over prediction windows")
    _add_run_options(p)
    _add_train_options(p)
    _add_eval_options(p)
    p.add_argument("--k", type=_int_list, default=[0, 1, 2, 3], help="Window values")
    p.add_argument("--seeds", type=_int_list, default=[0], help="Training seeds")

    p = sub.add_parser("ablate", help="SAC-B vs spatial-only vs full, seen and unseen worlds")
    _add_run_options(p)
    _add_train_options(p)
    _add_eval_options(p)
    p.add_argument("--eval-scenarios", type=str, default="square,lobby")

    p = sub.add_parser("inspect", help="Pillarize an XYZ cloud and dump the occupancy grid")
    p.add_argument("cloud_file", type=str)
    p.add_argument("--config", type=str, default=None)
    p.add_argument("--profile", choices=["desk", "paper"], default=None)
    p.add_argument("--out", type=str, default=None)

    p = sub.add_parser("gradcheck", help="Finite-difference check of every network block")
    p.add_argument("--block", action="append", default=None, help="Check only this block (repeatable)")
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    return parser.parse_args(argv)


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    """CLI flags as a partial ``RunConfig`` document."""
    doc: dict[str, Any] = {}
    train: dict[str, Any] = {}
    ev: dict[str, Any] = {}
    if getattr(args, "scenario", None):
        doc["scenario"] = args.scenario
        doc["world"] = None
    if getattr(args, "seed", None) is not None:
        doc["seed"] = args.seed
    if getattr(args, "steps", None) is not None:
        doc["steps"] = args.steps
    if getattr(args, "window", None) is not None:
        train["window"] = args.window
    if getattr(args, "no_scl", False):
        train["enable_scl"] = False
    if getattr(args, "no_tcl", False):
        train["enable_tcl"] = False
    if getattr(args, "episodes", None) is not None:
        ev["episodes"] = args.episodes
    if getattr(args, "peds", None) is not None:
        ev["pedestrians"] = args.peds
    if train:
        doc["train"] = train
    if ev:
        doc["eval"] = ev
    return doc


def _resolve(args: argparse.Namespace) -> RunConfig:
    return load_run_config(args.config, args.profile, _overrides(args))


def _resolve_from(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    return load_run_config(None, cfg.profile, deep_merge(cfg.model_dump(mode="json"), _overrides(args)))


def _out_dir(args: argparse.Namespace, command: str, cfg: RunConfig | None = None) -> Path:
    if args.out:
        return Path(args.out)
    root = Path(get_settings().output_root)
    if cfg is None:
        return root / command
    return root / f"{command}_{cfg.config_hash()}_seed{cfg.seed}"


def cmd_train(args: argparse.Namespace) -> int:
    from bevnav.agent.trainer import Trainer

    cfg = _resolve(args)
    out = _out_dir(args, "train", cfg)
    structlog.contextvars.bind_contextvars(config_hash=cfg.config_hash(), seed=cfg.seed)
    checkpoint = Trainer(cfg, out).run(resume_from=args.resume)
    print(checkpoint)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    from bevnav.agent.trainer import build_agent, read_checkpoint_meta
    from bevnav.evaluation import AgentPolicy, evaluate

    meta = read_checkpoint_meta(args.checkpoint)
    saved = meta.get("run_config")
    if args.config:
        train_cfg = load_run_config(args.config, args.profile)
    elif saved:
        train_cfg = load_run_config(None, args.profile, saved)
    else:
        raise ConfigError(f"{args.checkpoint} carries no run configuration; pass --config")
    agent = build_agent(train_cfg)
    agent.load(args.checkpoint)

    eval_cfg = _resolve_from(train_cfg, args)
    out = _out_dir(args, "eval", eval_cfg)
    structlog.contextvars.bind_contextvars(config_hash=train_cfg.config_hash(), seed=eval_cfg.seed)
    reports = evaluate(
        eval_cfg, AgentPolicy(agent), out, traces=args.traces, config_hash=train_cfg.config_hash()
    )
    for report in reports:
        print(json.dumps(report.as_row()))
    return 0


def cmd_sweep_k(args: argparse.Namespace) -> int:
    from bevnav.evaluation.sweeps import sweep_window

    cfg = _resolve(args)
    out = _out_dir(args, "sweep_k", cfg)
    structlog.contextvars.bind_contextvars(config_hash=cfg.config_hash())
    rows = sweep_window(cfg, args.k, args.seeds, out)
    for row in rows:
        print(json.dumps(row))
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    from bevnav.evaluation.sweeps import ablate

    cfg = _resolve(args)
    out = _out_dir(args, "ablate", cfg)
    structlog.contextvars.bind_contextvars(config_hash=cfg.config_hash(), seed=cfg.seed)
    scenarios = [s.strip() for s in args.eval_scenarios.split(",") if s.strip()]
    for row in ablate(cfg, out, scenarios):
        print(json.dumps(row))
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    from bevnav.bev.inspect import inspect_cloud

    cfg = load_run_config(args.config, args.profile)
    out = Path(args.out) if args.out else Path(get_settings().output_root) / "inspect"
    summary = inspect_cloud(args.cloud_file, cfg.pillars, out)
    print(json.dumps(summary))
    return 0


def cmd_gradcheck(args: argparse.Namespace) -> int:
    from bevnav.blocks import run_gradchecks

    reports = run_gradchecks(names=args.block, tolerance=args.tolerance, seed=args.seed)
    failed = [name for name, r in reports.items() if not r.passed]
    for name, report in reports.items():
        status = "PASS" if report.passed else "FAIL"
        print(f"{status}  {name}  max_rel_err={report.max_error:.3e}")
    print(f"{len(reports) - len(failed)}/{len(reports)} blocks passed")
    return 1 if failed else 0


COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "sweep-k": cmd_sweep_k,
    "ablate": cmd_ablate,
    "inspect": cmd_inspect,
    "gradcheck": cmd_gradcheck,
}


def run(argv: list[str] | None = None) -> int:
    """Execute one command. Returns the exit code."""
    args = _parse_args(argv)
    settings = get_settings()
    configure_logging(settings.log_level, settings.log_format)
    set_finite_checks(settings.finite_checks)
    structlog.contextvars.clear_contextvars()
    structlog.contextvars.bind_contextvars(command=args.command)
    try:
        return COMMANDS[args.command](args)
    except (BevNavError, FileNotFoundError) as e:
        log.error("command_failed", error=str(e), error_type=type(e).__name__)
        print(f"ERROR: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
