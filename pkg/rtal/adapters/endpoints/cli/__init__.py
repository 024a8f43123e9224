import argparse
import logging
from typing import Optional, Sequence

from injector import Injector
from pydantic import ValidationError

from rtal import __version__
from rtal.adapters.endpoints.cli.cli_injector import attach_injector
from rtal.adapters.endpoints.cli.controllers import (ablate_controller, average_controller, decode_controller,
                                                     gradcheck_controller, params_controller, train_controller)
from rtal.adapters.gateway.filesystem.repository.exceptions import (ECheckpointNotFound, ECorruptCheckpoint,
                                                                      EInvalidSequenceFile,
                                                                      EUnsupportedCheckpointVersion)
from rtal.business_rules.exceptions.checkpoint_exceptions import ENotEnoughCheckpoints, ERunNotFound
from rtal.business_rules.exceptions.experiment_exceptions import EEmptyGrid, EInvalidConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class EUsageError(Exception):
    pass


class CommandLineParser(argparse.ArgumentParser):
    def error(self, message):
        raise EUsageError(f"{self.prog}: {message}")


USAGE_ERRORS = (EUsageError, EInvalidConfig, ValidationError, EEmptyGrid, ENotEnoughCheckpoints, ERunNotFound,
                ECheckpointNotFound, ECorruptCheckpoint, EInvalidSequenceFile, EUnsupportedCheckpointVersion,
                FileNotFoundError, KeyError, IndexError, ValueError)


def build(injector: Injector) -> argparse.ArgumentParser:
    parser = CommandLineParser(
        prog="rtal",
        description="Seq2seq Transformer with residual tree aggregation of layers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    for controller in (train_controller, ablate_controller, params_controller,
                       decode_controller, average_controller, gradcheck_controller):
        controller.register(subparsers)

    attach_injector(parser, injector)

    return parser


def exit_code_for(error: BaseException) -> Optional[int]:
    # numerical failures all derive from ArithmeticError
    if isinstance(error, ArithmeticError):
        return EXIT_NUMERICAL
    if isinstance(error, USAGE_ERRORS):
        return EXIT_USAGE
    return None


def run(parser: argparse.ArgumentParser, argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except Exception as error:
        code = exit_code_for(error)
        if code is None:
            raise
        logger.error(f"{type(error).__name__}: {error}")
        return code
