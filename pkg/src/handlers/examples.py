import logging
from typing import Optional

from src.errors import ConfigError
from src.handlers.options import add_common_arguments, apply_overrides
from src.harness.experiment import ExperimentResult, run_experiment
from src.harness.settings import builtin_experiments, load_experiment

log = logging.getLogger("silo.cli")


def setup(subparsers) -> None:
    parser = subparsers.add_parser("examples", help="list or run the built-in experiments")
    parser.add_argument("name", nargs="?", help="built-in experiment to run")
    parser.add_argument("--list", action="store_true", help="print the built-in experiment names")
    add_common_arguments(parser)
    parser.set_defaults(handler=handle_examples)


def handle_examples(args) -> Optional[ExperimentResult]:
    available = builtin_experiments()
    if args.list or not args.name:
        for name in available:
            print(name)
        return None
    if args.name not in available:
        raise ConfigError("name", f"no built-in experiment {args.name!r}; try `examples --list`")
    cfg = apply_overrides(load_experiment(available[args.name]), args)
    return run_experiment(cfg)
