from abc import ABCMeta, abstractmethod
from pathlib import Path
from typing import List

from rtal.entities.checkpoint.schema import Checkpoint


class ICheckpointRepository(metaclass=ABCMeta):
    @abstractmethod
    def save(self, run_dir: Path, checkpoint: Checkpoint) -> Path:
        pass

    @abstractmethod
    def save_average(self, run_dir: Path, checkpoint: Checkpoint) -> Path:
        pass

    @abstractmethod
    def load(self, path: Path) -> Checkpoint:
        pass

    @abstractmethod
    def load_step(self, run_dir: Path, step: int) -> Checkpoint:
        pass

    @abstractmethod
    def load_average(self, run_dir: Path) -> Checkpoint:
        pass

    @abstractmethod
    def has_average(self, run_dir: Path) -> bool:
        pass

    @abstractmethod
    def list_steps(self, run_dir: Path) -> List[int]:
        pass
