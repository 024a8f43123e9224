"""
Hands the application's injector to command handlers.

The injector rides on the parsed arguments, so a handler only ever sees the
namespace argparse gives it.
"""

import argparse
from typing import Any, TypeVar

from injector import Injector


class InjectorNotAttached(ValueError):
    """Raised when a handler asks for a dependency before an injector was attached."""


def attach_injector(parser: argparse.ArgumentParser, injector: Injector) -> None:
    parser.set_defaults(injector=injector)


def get_injector_instance(args: argparse.Namespace) -> Injector:
    try:
        return args.injector
    except AttributeError as exc:
        raise InjectorNotAttached("No injector instance has been attached to the command line.") from exc


BoundInterface = TypeVar("BoundInterface", bound=type)


def Injected(args: argparse.Namespace, interface: BoundInterface) -> Any:  # pylint: disable=invalid-name
    """Asks the attached injector for the specified type."""
    return get_injector_instance(args).get(interface)


__all__ = [
    "attach_injector",
    "get_injector_instance",
    "Injected",
    "InjectorNotAttached",
]
