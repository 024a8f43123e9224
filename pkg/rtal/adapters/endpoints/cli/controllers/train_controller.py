import argparse

from rtal.adapters.endpoints.cli.cli_injector import Injected
from rtal.adapters.endpoints.cli.config_loader import load_experiment, resolve_run_dir
from rtal.business_rules.use_cases.training_use_case import TrainingUseCase


def register(subparsers) -> None:
    parser = subparsers.add_parser("train", help="train a model from an experiment config")
    parser.add_argument("config", nargs="?", help="experiment config (JSON)")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config value, dotted keys for nested fields")
    parser.add_argument("--output-dir", help="run directory (default: config output_dir or RTAL_RUNS_DIR/name)")
    parser.add_argument("--resume", metavar="RUN_DIR", help="continue the run stored in RUN_DIR")
    parser.add_argument("--steps", type=int, help="with --resume: new total number of steps")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    training_use_case: TrainingUseCase = Injected(args, TrainingUseCase)
    if args.resume:
        result = training_use_case.resume(args.resume, args.steps)
    else:
        if not args.config:
            raise ValueError("train needs a config file unless --resume is given")
        config = load_experiment(args.config, args.overrides)
        result = training_use_case.train(config, resolve_run_dir(config, args.output_dir))

    print(result.json(indent=2))
    return 0
