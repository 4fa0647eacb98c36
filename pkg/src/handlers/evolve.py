from src.handlers.options import add_run_arguments, experiment_from_args
from src.harness.experiment import ExperimentResult, run_experiment


def setup(subparsers) -> None:
    parser = subparsers.add_parser("evolve", help="explicit upwind evolution from rest until similarity")
    add_run_arguments(parser)
    parser.set_defaults(handler=handle_evolve)


def handle_evolve(args) -> ExperimentResult:
    return run_experiment(experiment_from_args(args, "evolve"))
