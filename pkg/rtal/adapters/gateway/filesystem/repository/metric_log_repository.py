import json
from pathlib import Path
from typing import List

from injector import inject

from rtal.adapters.gateway.filesystem.run_directory import RunDirectory
from rtal.entities.metrics.repository import IMetricLogRepository
from rtal.entities.metrics.schema import MetricRecord

METRICS_FILE = "metrics.jsonl"


@inject
class MetricLogRepository(IMetricLogRepository):
    def __init__(self, session: RunDirectory) -> None:
        self.session = session

    def path(self, run_dir: Path) -> Path:
        return Path(run_dir) / METRICS_FILE

    def append(self, run_dir: Path, record: MetricRecord) -> None:
        path = self.path(run_dir)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open('a', encoding='utf-8') as handle:
            handle.write(record.json() + "\n")

    def read(self, run_dir: Path) -> List[MetricRecord]:
        path = self.path(run_dir)
        if not path.is_file():
            return []
        with path.open(encoding='utf-8') as handle:
            return [MetricRecord(**json.loads(line)) for line in handle if line.strip()]

    def truncate_after(self, run_dir: Path, step: int) -> None:
        kept = [record for record in self.read(run_dir) if record.step <= step]
        with self.session.scope(self.path(run_dir)) as handle:
            handle.writelines(record.json() + "\n" for record in kept)
