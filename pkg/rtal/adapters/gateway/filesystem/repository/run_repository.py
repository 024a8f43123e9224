import json
from pathlib import Path
from typing import List, Sequence

from injector import inject
from pydantic import ValidationError

from rtal.adapters.gateway.filesystem.repository.exceptions import EInvalidSequenceFile
from rtal.adapters.gateway.filesystem.run_directory import RunDirectory
from rtal.business_rules.exceptions.checkpoint_exceptions import ERunNotFound
from rtal.business_rules.exceptions.experiment_exceptions import EInvalidConfig
from rtal.entities.experiment.repository import IRunRepository
from rtal.entities.experiment.schema import ExperimentConfig

CONFIG_FILE = "config.json"


def describe_validation_error(error: ValidationError) -> str:
    return "; ".join(f"{'.'.join(str(part) for part in item['loc'])}: {item['msg']}" for item in error.errors())


@inject
class RunRepository(IRunRepository):
    def __init__(self, session: RunDirectory) -> None:
        self.session = session

    def save_config(self, run_dir: Path, config: ExperimentConfig) -> Path:
        return self.write_report(run_dir, CONFIG_FILE, config.json(indent=2) + "\n")

    def load_config(self, run_dir: Path) -> ExperimentConfig:
        path = Path(run_dir) / CONFIG_FILE
        if not path.is_file():
            raise ERunNotFound(f"{run_dir} is not a run directory (no {CONFIG_FILE})")
        try:
            return ExperimentConfig(**json.loads(path.read_text(encoding='utf-8')))
        except ValidationError as error:
            raise EInvalidConfig(f"{path}: {describe_validation_error(error)}") from error

    def write_report(self, run_dir: Path, name: str, content: str) -> Path:
        path = Path(run_dir) / name
        with self.session.scope(path) as handle:
            handle.write(content)
        return path

    def read_sequences(self, path: Path, allow_blank: bool = False) -> List[List[int]]:
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"no such input file: {path}")
        sequences = []
        with path.open(encoding='utf-8') as handle:
            for number, line in enumerate(handle, start=1):
                tokens = line.split()
                if not tokens and not allow_blank:
                    raise EInvalidSequenceFile(f"{path}:{number}: blank line, expected at least one token id")
                try:
                    sequences.append([int(token) for token in tokens])
                except ValueError as error:
                    raise EInvalidSequenceFile(f"{path}:{number}: {error}") from error
        return sequences

    def write_sequences(self, path: Path, sequences: Sequence[Sequence[int]]) -> Path:
        path = Path(path)
        with self.session.scope(path) as handle:
            handle.writelines(" ".join(str(token) for token in sequence) + "\n" for sequence in sequences)
        return path
