import argparse

from rtal.adapters.endpoints.cli.cli_injector import Injected
from rtal.adapters.endpoints.cli.config_loader import load_experiment, read_json, resolve_run_dir
from rtal.business_rules.use_cases.ablation_use_case import AblationUseCase, format_csv
from rtal.entities.experiment.schema import AblationAxis
from rtal.infrastructure.config import DefaultConfig


def register(subparsers) -> None:
    parser = subparsers.add_parser("ablate", help="train one model per aggregation variant and compare them")
    parser.add_argument("config", help="experiment config (JSON)")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--axis", choices=[axis.value for axis in AblationAxis],
                       help="sweep one aggregation axis around the config's aggregation")
    group.add_argument("--grid", help="JSON list of aggregation overrides, one object per cell")
    parser.add_argument("--output-dir")
    parser.add_argument("--workers", type=int, default=DefaultConfig.ABLATION_WORKERS)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    ablation_use_case: AblationUseCase = Injected(args, AblationUseCase)
    config = load_experiment(args.config, args.overrides)
    grid = read_json(args.grid) if args.grid else None
    axis = AblationAxis(args.axis) if args.axis else None

    rows = ablation_use_case.ablate(config, resolve_run_dir(config, args.output_dir), axis, grid, args.workers)
    print(format_csv(rows), end="")
    return 0
