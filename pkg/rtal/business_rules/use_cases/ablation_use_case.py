import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from injector import inject
from pydantic import BaseModel

from rtal.business_rules.exceptions.experiment_exceptions import EEmptyGrid
from rtal.business_rules.use_cases.checkpoint_use_case import CheckpointUseCase
from rtal.business_rules.use_cases.decoding_use_case import decode_all
from rtal.business_rules.use_cases.training_use_case import TrainingUseCase
from rtal.entities.evaluation.bleu import bleu_report
from rtal.entities.experiment.repository import IRunRepository
from rtal.entities.experiment.schema import AblationAxis, AblationCell, ExperimentConfig, ablation_cells
from rtal.entities.model.params import count_params
from rtal.entities.model.schema import ModelConfig
from rtal.entities.task.generator import generate_task
from rtal.entities.task.schema import Split

logger = logging.getLogger(__name__)

ABLATION_CSV = "ablation.csv"
ABLATION_JSON = "ablation.json"
COLUMNS = ["cell", "structure", "formula", "position", "status", "final_loss", "token_accuracy",
           "exact_match", "bleu", "params", "error"]


class AblationRow(BaseModel):
    cell: str
    structure: str
    formula: str
    position: str
    status: str
    final_loss: Optional[float] = None
    token_accuracy: Optional[float] = None
    exact_match: Optional[float] = None
    bleu: Optional[float] = None
    params: Optional[int] = None
    error: Optional[str] = None


def format_csv(rows: Sequence[AblationRow]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: "" if value is None else value for key, value in row.dict().items()})
    return buffer.getvalue()


@inject
@dataclass
class AblationUseCase():
    run_repository: IRunRepository
    training_use_case: TrainingUseCase
    checkpoint_use_case: CheckpointUseCase

    def _cell_config(self, config: ExperimentConfig, cell: AblationCell, cell_dir: Path) -> ExperimentConfig:
        model = ModelConfig(**{**config.model.dict(), 'aggregation': cell.aggregation.dict()})
        return ExperimentConfig(**{**config.dict(), 'name': f"{config.name}/{cell.cell}",
                                   'model': model.dict(), 'output_dir': str(cell_dir)})

    def run_cell(self, config: ExperimentConfig, cell: AblationCell, run_dir: Path) -> AblationRow:
        spec = cell.aggregation
        row = dict(cell=cell.cell, structure=spec.structure.value, formula=spec.formula.value,
                   position=spec.position.value)
        logger.info(f"ablation cell {cell.cell} started")
        try:
            cell_dir = Path(run_dir) / "cells" / cell.cell
            cell_config = self._cell_config(config, cell, cell_dir)
            result = self.training_use_case.train(cell_config, cell_dir)
            model = self.checkpoint_use_case.load_model(cell_dir, use_average=False)
            test = generate_task(cell_config.task, Split.TEST, cell_config.training.eval_size, cell_config.seed)
            outputs = decode_all(model, [source for source, _ in test], beam_size=1, alpha=0.0,
                                 max_len=cell_config.task.max_len + 1)
            report = bleu_report(outputs, [target for _, target in test])
        except Exception as error:
            logger.error(f"ablation cell {cell.cell} failed: {error}")
            return AblationRow(**row, status="failed", error=f"{type(error).__name__}: {error}")

        logger.info(f"ablation cell {cell.cell} finished: loss {result.final_loss}, exact match {report.exact_match}")
        return AblationRow(**row, status="ok", final_loss=result.final_loss, token_accuracy=result.token_accuracy,
                           exact_match=report.exact_match, bleu=report.bleu,
                           params=count_params(cell_config.model).total)

    def ablate(self, config: ExperimentConfig, run_dir: Path, axis: Optional[AblationAxis] = None,
               grid: Optional[Sequence[Dict[str, Any]]] = None, workers: int = 1) -> List[AblationRow]:
        cells = ablation_cells(config.model.aggregation, axis, grid)
        if not cells:
            raise EEmptyGrid("the ablation grid has no cells")
        run_dir = Path(run_dir)
        self.run_repository.save_config(run_dir, config)

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(self.run_cell, config, cell, run_dir) for cell in cells]
                rows = [future.result() for future in futures]
        else:
            rows = [self.run_cell(config, cell, run_dir) for cell in cells]

        self.run_repository.write_report(run_dir, ABLATION_CSV, format_csv(rows))
        self.run_repository.write_report(run_dir, ABLATION_JSON,
                                         json.dumps([row.dict() for row in rows], indent=2) + "\n")
        failed = [row.cell for row in rows if row.status != "ok"]
        logger.info(f"ablation finished: {len(rows) - len(failed)} ok, {len(failed)} failed {failed or ''}")
        return rows
