import json
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from pydantic import ValidationError

from rtal.adapters.gateway.filesystem.repository.run_repository import describe_validation_error
from rtal.business_rules.exceptions.experiment_exceptions import EInvalidConfig
from rtal.entities.experiment.schema import ExperimentConfig, apply_overrides
from rtal.entities.model.schema import ModelConfig
from rtal.infrastructure.config import DefaultConfig


def read_json(path: Path) -> Any:
    path = Path(path)
    if not path.is_file():
        raise EInvalidConfig(f"config file not found: {path}")
    try:
        return json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as error:
        raise EInvalidConfig(f"{path} is not valid JSON: {error}") from error


def parse_experiment(raw: Dict[str, Any], overrides: Sequence[str] = (), source: str = "config") -> ExperimentConfig:
    try:
        return ExperimentConfig(**apply_overrides(raw, overrides))
    except ValueError as error:
        if isinstance(error, ValidationError):
            raise EInvalidConfig(f"{source}: {describe_validation_error(error)}") from error
        raise EInvalidConfig(f"{source}: {error}") from error


def load_experiment(path: Path, overrides: Sequence[str] = ()) -> ExperimentConfig:
    return parse_experiment(read_json(path), overrides, str(path))


def resolve_run_dir(config: ExperimentConfig, output_dir: Optional[str]) -> Path:
    if output_dir:
        return Path(output_dir)
    if config.output_dir:
        return Path(config.output_dir)
    return Path(DefaultConfig.RUNS_DIR) / config.name


def parse_model(raw: Dict[str, Any], overrides: Sequence[str] = (), source: str = "model") -> ModelConfig:
    try:
        return ModelConfig(**apply_overrides(raw, overrides))
    except ValueError as error:
        if isinstance(error, ValidationError):
            raise EInvalidConfig(f"{source}: {describe_validation_error(error)}") from error
        raise EInvalidConfig(f"{source}: {error}") from error
