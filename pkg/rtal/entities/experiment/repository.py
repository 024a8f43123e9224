from abc import ABCMeta, abstractmethod
from pathlib import Path
from typing import List, Sequence

from rtal.entities.experiment.schema import ExperimentConfig


class IRunRepository(metaclass=ABCMeta):
    @abstractmethod
    def save_config(self, run_dir: Path, config: ExperimentConfig) -> Path:
        pass

    @abstractmethod
    def load_config(self, run_dir: Path) -> ExperimentConfig:
        pass

    @abstractmethod
    def write_report(self, run_dir: Path, name: str, content: str) -> Path:
        pass

    @abstractmethod
    def read_sequences(self, path: Path, allow_blank: bool = False) -> List[List[int]]:
        pass

    @abstractmethod
    def write_sequences(self, path: Path, sequences: Sequence[Sequence[int]]) -> Path:
        pass
