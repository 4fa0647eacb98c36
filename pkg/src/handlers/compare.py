from src.handlers.options import add_run_arguments, experiment_from_args
from src.harness.experiment import ExperimentResult, run_experiment


def setup(subparsers) -> None:
    parser = subparsers.add_parser("compare", help="error table of FE and FD profiles over a grid sweep")
    add_run_arguments(parser)
    parser.set_defaults(handler=handle_compare)


def handle_compare(args) -> ExperimentResult:
    return run_experiment(experiment_from_args(args, "compare"))
