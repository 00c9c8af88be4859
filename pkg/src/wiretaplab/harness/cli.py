"""Command-line interface.

    wiretaplab train       --config exp.cfg [--seed N] [--profile fast|paper] [--out DIR]
    wiretaplab eval        ...
    wiretaplab seed-search ...
    wiretaplab leakage     ...
    wiretaplab bounds      ...
    wiretaplab reproduce FIG ...      FIG in fig3..fig9

Flags override config-file values; every run writes its artifacts plus a
content-hashed manifest.json under the output directory.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .config import ExperimentConfig, parse_config_file
from .experiments import (
    FIGURE_TAGS,
    cmd_bounds,
    cmd_eval,
    cmd_leakage,
    cmd_reproduce,
    cmd_seed_search,
    cmd_train,
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="flat key-value config file")
    parser.add_argument("--seed", type=int, help="global RNG seed override")
    parser.add_argument(
        "--profile", choices=("fast", "paper"),
        help="budget profile override (training and leakage estimator)",
    )
    parser.add_argument("--out", type=Path, help="output directory override")
    parser.add_argument(
        "--no-plots", action="store_true", help="skip figure rendering"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wiretaplab",
        description="Short-blocklength Gaussian wiretap code laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("train", "eval", "seed-search", "leakage", "bounds"):
        _add_common(sub.add_parser(name))
    rep = sub.add_parser("reproduce")
    rep.add_argument("figure", choices=FIGURE_TAGS)
    _add_common(rep)
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config is not None:
        cfg = parse_config_file(args.config, cfg)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.profile is not None:
        overrides["train_profile"] = args.profile
        overrides["mine_profile"] = args.profile
    if args.out is not None:
        overrides["out_dir"] = str(args.out)
    if args.no_plots:
        overrides["plots"] = False
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = resolve_config(args)
    root = Path(cfg.out_dir)
    runners = {
        "train": cmd_train,
        "eval": cmd_eval,
        "seed-search": cmd_seed_search,
        "leakage": cmd_leakage,
        "bounds": cmd_bounds,
    }
    if args.command == "reproduce":
        manifest = cmd_reproduce(args.figure, cfg, root)
    else:
        manifest = runners[args.command](cfg, root)
    print(f"wrote {len(manifest.artifacts)} artifacts to {root} "
          f"(config {manifest.config_digest})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
