from abc import ABCMeta, abstractmethod
from pathlib import Path
from typing import List

from rtal.entities.metrics.schema import MetricRecord


class IMetricLogRepository(metaclass=ABCMeta):
    @abstractmethod
    def append(self, run_dir: Path, record: MetricRecord) -> None:
        pass

    @abstractmethod
    def read(self, run_dir: Path) -> List[MetricRecord]:
        pass

    @abstractmethod
    def truncate_after(self, run_dir: Path, step: int) -> None:
        pass
