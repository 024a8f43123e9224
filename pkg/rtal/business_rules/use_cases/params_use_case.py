import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from injector import inject

from rtal.entities.experiment.repository import IRunRepository
from rtal.entities.model.params import ParamReport, count_params
from rtal.entities.model.schema import ModelConfig

logger = logging.getLogger(__name__)

PARAMS_JSON = "params.json"


def format_params(config: ModelConfig, report: ParamReport) -> str:
    rows = report.rows() + [('total', report.total)]
    width = max(len(name) for name, _ in rows)
    lines = [f"aggregation: {config.aggregation.label()}"]
    lines += [f"{name.ljust(width)}  {value:>14,d}" for name, value in rows]
    return "\n".join(lines) + "\n"


@inject
@dataclass
class ParamsUseCase():
    run_repository: IRunRepository

    def report(self, config: ModelConfig, run_dir: Optional[Path] = None) -> ParamReport:
        report = count_params(config)
        logger.info(f"{config.aggregation.label()}: {report.total:,d} parameters")
        if run_dir is not None:
            self.run_repository.write_report(run_dir, PARAMS_JSON, report.json(indent=2) + "\n")
        return report
