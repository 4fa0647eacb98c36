import argparse
from typing import Optional

from src.harness.settings import ExperimentConfig, load_experiment, parse_h_list


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="output directory (overrides out_dir)")
    parser.add_argument("--h-list", help="comma-separated, strictly decreasing grid sizes")
    parser.add_argument("--max-steps", type=int, help="cap on explicit time steps per row")
    parser.add_argument("--quiet", action="store_true", help="only log warnings and errors")


def add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="experiment file (dotenv format)")
    add_common_arguments(parser)


def apply_overrides(cfg: ExperimentConfig, args, mode: Optional[str] = None) -> ExperimentConfig:
    h_list = parse_h_list(args.h_list, "--h-list") if args.h_list else None
    return cfg.with_overrides(out_dir=args.out, h_list=h_list, max_steps=args.max_steps, mode=mode)


def experiment_from_args(args, mode: str) -> ExperimentConfig:
    return apply_overrides(load_experiment(args.config), args, mode)
