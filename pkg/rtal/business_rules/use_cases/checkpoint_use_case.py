import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List

from injector import inject

from rtal.business_rules.exceptions.checkpoint_exceptions import ENotEnoughCheckpoints, ERunNotFound
from rtal.entities.checkpoint.averaging import average_checkpoints
from rtal.entities.checkpoint.repository import ICheckpointRepository
from rtal.entities.checkpoint.schema import Checkpoint
from rtal.entities.exceptions import ECheckpointMismatch
from rtal.entities.experiment.repository import IRunRepository
from rtal.entities.model.seq2seq import Seq2SeqModel, build

logger = logging.getLogger(__name__)


@inject
@dataclass
class CheckpointUseCase():
    run_repository: IRunRepository
    checkpoint_repository: ICheckpointRepository

    def trained_steps(self, run_dir: Path) -> List[int]:
        """Saved steps, excluding the untrained step-0 checkpoint."""
        return [step for step in self.checkpoint_repository.list_steps(run_dir) if step > 0]

    def average(self, run_dir: Path, k: int) -> Path:
        if k < 1:
            raise ENotEnoughCheckpoints(f"k must be >= 1, got {k}")
        steps = self.trained_steps(run_dir)
        if len(steps) < k:
            raise ENotEnoughCheckpoints(f"{run_dir} holds {len(steps)} trained checkpoint(s), {k} requested")
        chosen = steps[-k:]
        averaged = average_checkpoints([self.checkpoint_repository.load_step(run_dir, step) for step in chosen])
        path = self.checkpoint_repository.save_average(run_dir, averaged)
        logger.info(f"averaged checkpoints at steps {chosen} into {path}")
        return path

    def evaluation_checkpoint(self, run_dir: Path, use_average: bool = True) -> Checkpoint:
        if use_average and self.checkpoint_repository.has_average(run_dir):
            return self.checkpoint_repository.load_average(run_dir)
        steps = self.checkpoint_repository.list_steps(run_dir)
        if not steps:
            raise ERunNotFound(f"{run_dir} holds no checkpoint")
        if use_average:
            logger.warning(f"{run_dir} has no averaged checkpoint; using step {steps[-1]}")
        return self.checkpoint_repository.load_step(run_dir, steps[-1])

    def load_model(self, run_dir: Path, use_average: bool = True) -> Seq2SeqModel:
        config = self.run_repository.load_config(run_dir)
        checkpoint = self.evaluation_checkpoint(run_dir, use_average)
        if checkpoint.config_digest != config.model.digest():
            raise ECheckpointMismatch(f"checkpoint at step {checkpoint.step} does not belong to the config in {run_dir}")
        model = build(config.model)
        model.load_state_dict(checkpoint.model_params)
        return model
