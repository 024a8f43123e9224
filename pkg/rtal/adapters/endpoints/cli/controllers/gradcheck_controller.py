import argparse

from rtal.adapters.endpoints.cli.cli_injector import Injected
from rtal.business_rules.use_cases.gradcheck_use_case import SUITE, GradcheckUseCase


def register(subparsers) -> None:
    parser = subparsers.add_parser("gradcheck", help="run the double-precision gradient checks")
    parser.add_argument("--only", nargs="+", choices=list(SUITE), help="run only these checks")
    parser.add_argument("--threshold", type=float, default=1e-5)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    gradcheck_use_case: GradcheckUseCase = Injected(args, GradcheckUseCase)
    results = gradcheck_use_case.run(args.only, args.threshold)
    width = max(len(result.name) for result in results)
    for result in results:
        print(f"{result.name.ljust(width)}  {result.error:.3e}  {'ok' if result.passed else 'FAILED'}")
    gradcheck_use_case.verify(results)
    return 0
