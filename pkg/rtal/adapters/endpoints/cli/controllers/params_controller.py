import argparse

from rtal.adapters.endpoints.cli.cli_injector import Injected
from rtal.adapters.endpoints.cli.config_loader import load_experiment, parse_model
from rtal.business_rules.use_cases.params_use_case import ParamsUseCase, format_params
from rtal.entities.experiment.repository import IRunRepository
from rtal.entities.model.presets import get_preset, preset_names


def register(subparsers) -> None:
    parser = subparsers.add_parser("params", help="itemized parameter count of a model config")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("config", nargs="?", help="experiment config (JSON)")
    source.add_argument("--preset", choices=preset_names(), help="a named model config; --set keys are model fields")
    source.add_argument("--run", metavar="RUN_DIR", help="count the model stored in a run directory")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    parser.add_argument("--output-dir", help="also write params.json here")
    parser.add_argument("--json", action="store_true", help="print JSON instead of the table")
    parser.set_defaults(handler=handle)


def _model_config(args: argparse.Namespace):
    if args.preset:
        return parse_model(get_preset(args.preset).dict(), args.overrides, args.preset)
    if args.run:
        return Injected(args, IRunRepository).load_config(args.run).model
    return load_experiment(args.config, args.overrides).model


def handle(args: argparse.Namespace) -> int:
    params_use_case: ParamsUseCase = Injected(args, ParamsUseCase)
    config = _model_config(args)
    report = params_use_case.report(config, args.output_dir or args.run)
    print(report.json(indent=2) if args.json else format_params(config, report), end="\n" if args.json else "")
    return 0
