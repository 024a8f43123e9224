import argparse

from rtal.adapters.endpoints.cli.cli_injector import Injected
from rtal.business_rules.use_cases.checkpoint_use_case import CheckpointUseCase
from rtal.infrastructure.config import DefaultConfig


def register(subparsers) -> None:
    parser = subparsers.add_parser("average", help="average the last k checkpoints of a run")
    parser.add_argument("run_dir")
    parser.add_argument("--k", type=int, default=DefaultConfig.AVERAGE_LAST)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    checkpoint_use_case: CheckpointUseCase = Injected(args, CheckpointUseCase)
    print(checkpoint_use_case.average(args.run_dir, args.k))
    return 0
