from src.handlers.options import add_run_arguments, experiment_from_args
from src.harness.experiment import ExperimentResult, run_experiment


def setup(subparsers) -> None:
    parser = subparsers.add_parser("similarity", help="discrete similarity profiles from the FE potential")
    add_run_arguments(parser)
    parser.set_defaults(handler=handle_similarity)


def handle_similarity(args) -> ExperimentResult:
    return run_experiment(experiment_from_args(args, "similarity"))
