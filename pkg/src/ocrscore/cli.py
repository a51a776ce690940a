"""Command-line interface.

Subcommands: ``score`` (dataset -> report JSON), ``grpo-sim`` (toy policy
optimization -> trajectory CSV), ``filter`` (rollout groups -> kept ids),
``validate-config``. Exit codes: 0 ok, 2 configuration, 3 dataset,
4 transport, 5 internal. Failures print one machine-readable JSON object
to stderr. Precedence: defaults < config file < environment < flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .bench import render_report_json, render_report_text
from .config import RunConfig, apply_env_overrides, load_config
from .errors import (
    ConfigError,
    DatasetError,
    OcrScoreError,
    TransportError,
)
from .grpo import (
    entropy_filter,
    load_rollout_groups,
    simulate_toy_policy_stats,
    write_trajectory_csv,
)
from .pipeline import run_score

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATASET = 3
EXIT_TRANSPORT = 4
EXIT_INTERNAL = 5

log = logging.getLogger("ocrscore")


def _exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, DatasetError):
        return EXIT_DATASET
    if isinstance(exc, TransportError):
        return EXIT_TRANSPORT
    return EXIT_INTERNAL


def _fail(exc: BaseException) -> int:
    code = _exit_code_for(exc)
    payload = {
        "error": type(exc).__name__,
        "message": str(exc),
        "exit_code": code,
    }
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def _base_config(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    return apply_env_overrides(config)


def _merge_common(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates = {}
    if getattr(args, "dataset", None):
        updates["dataset_path"] = Path(args.dataset)
    if getattr(args, "output", None):
        updates["output_path"] = Path(args.output)
    if getattr(args, "workers", None) is not None:
        updates["workers"] = args.workers
    if updates:
        config = dataclasses.replace(config, **updates)
    vision_updates = {}
    if getattr(args, "backend", None):
        vision_updates["backend"] = args.backend
    if getattr(args, "endpoint", None):
        vision_updates["endpoint"] = args.endpoint
    if vision_updates:
        config = dataclasses.replace(
            config, vision=dataclasses.replace(config.vision, **vision_updates)
        )
    return config


def _merge_grpo(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates = {}
    for flag, field in (
        ("target", "target"),
        ("group_size", "group_size"),
        ("iterations", "iterations"),
        ("step_size", "step_size"),
        ("seed", "seed"),
        ("bins", "entropy_bins"),
        ("threshold", "entropy_threshold"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            updates[field] = value
    if updates:
        config = dataclasses.replace(
            config, grpo=dataclasses.replace(config.grpo, **updates)
        )
    return config


def _require_output(config: RunConfig) -> Path:
    if config.output_path is None:
        raise ConfigError("no output path configured (set 'output' or pass --output)")
    config.output_path.parent.mkdir(parents=True, exist_ok=True)
    return config.output_path


def cmd_score(args: argparse.Namespace) -> int:
    config = _merge_common(_base_config(args), args)
    output = _require_output(config)
    report, transport_failures = run_score(config)
    output.write_text(render_report_json(report), encoding="utf-8")
    print(render_report_text(report), end="")
    if transport_failures:
        error = TransportError(
            f"{len(transport_failures)} record(s) unscored due to embedding "
            "transport failures: " + ", ".join(transport_failures)
        )
        return _fail(error)
    return EXIT_OK


def cmd_grpo_sim(args: argparse.Namespace) -> int:
    config = _merge_grpo(_merge_common(_base_config(args), args), args)
    output = _require_output(config)
    grpo_cfg = config.grpo
    stats = simulate_toy_policy_stats(
        grpo_cfg.target,
        grpo_cfg.group_size,
        grpo_cfg.iterations,
        step_size=grpo_cfg.step_size,
        seed=grpo_cfg.seed,
    )
    write_trajectory_csv(stats, output)
    first = stats[0].mean_reward
    last = stats[-1].mean_reward
    print(
        f"simulated {len(stats)} iterations (target {grpo_cfg.target!r}, "
        f"G={grpo_cfg.group_size}, seed={grpo_cfg.seed}): "
        f"mean reward {first:.3f} -> {last:.3f}"
    )
    return EXIT_OK


def cmd_filter(args: argparse.Namespace) -> int:
    config = _merge_grpo(_merge_common(_base_config(args), args), args)
    if not args.groups:
        raise ConfigError("no groups file given (pass --groups)")
    output = _require_output(config)
    groups = load_rollout_groups(args.groups)
    kept = entropy_filter(
        groups,
        reward_bins=config.grpo.entropy_bins,
        threshold=config.grpo.entropy_threshold,
    )
    output.write_text("".join(f"{gid}\n" for gid in kept), encoding="utf-8")
    print(f"kept {len(kept)} of {len(groups)} groups")
    return EXIT_OK


def cmd_validate_config(args: argparse.Namespace) -> int:
    if not args.config:
        raise ConfigError("no config file given (pass --config)")
    config = apply_env_overrides(load_config(args.config))
    if config.dataset_path is not None and not config.dataset_path.exists():
        raise DatasetError(f"dataset file not found: {config.dataset_path}")
    summary = {
        "dataset": str(config.dataset_path) if config.dataset_path else None,
        "output": str(config.output_path) if config.output_path else None,
        "workers": config.workers,
        "vision_backend": config.vision.backend,
        "render_enabled": config.render.enabled,
    }
    print("config ok: " + json.dumps(summary, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocrscore",
        description="Reward computation and benchmark reports for OCR outputs.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="YAML config file")
        p.add_argument("--dataset", help="JSONL dataset path")
        p.add_argument("--output", help="output file path")
        p.add_argument("--workers", type=int, help="worker thread count")

    p_score = sub.add_parser("score", help="score a dataset and write a report")
    add_common(p_score)
    p_score.add_argument("--backend", choices=["stub", "remote"])
    p_score.add_argument("--endpoint", help="remote embedding service URL")
    p_score.set_defaults(func=cmd_score)

    p_sim = sub.add_parser("grpo-sim", help="run the toy policy optimization")
    add_common(p_sim)
    p_sim.add_argument("--target", help="target string")
    p_sim.add_argument("--group-size", dest="group_size", type=int)
    p_sim.add_argument("--iterations", type=int)
    p_sim.add_argument("--step-size", dest="step_size", type=float)
    p_sim.add_argument("--seed", type=int)
    p_sim.set_defaults(func=cmd_grpo_sim)

    p_filter = sub.add_parser("filter", help="entropy-filter rollout groups")
    add_common(p_filter)
    p_filter.add_argument("--groups", help="rollout groups JSONL path")
    p_filter.add_argument("--bins", type=int, help="reward histogram bins")
    p_filter.add_argument("--threshold", type=float, help="entropy threshold")
    p_filter.set_defaults(func=cmd_filter)

    p_validate = sub.add_parser("validate-config", help="check a config file")
    p_validate.add_argument("--config", help="YAML config file")
    p_validate.set_defaults(func=cmd_validate_config)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except OcrScoreError as exc:
        return _fail(exc)
    except Exception as exc:  # pragma: no cover - defensive catch-all
        log.exception("internal error")
        return _fail(exc)


if __name__ == "__main__":
    raise SystemExit(main())
