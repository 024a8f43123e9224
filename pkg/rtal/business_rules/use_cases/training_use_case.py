import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from injector import inject
from pydantic import BaseModel

from rtal.business_rules.exceptions.experiment_exceptions import EInvalidConfig
from rtal.business_rules.exceptions.training_exceptions import ETrainingDiverged
from rtal.entities.checkpoint.repository import ICheckpointRepository
from rtal.entities.checkpoint.schema import Checkpoint
from rtal.entities.decoding.beam_search import greedy_decode, strip_eos
from rtal.entities.evaluation.bleu import exact_match
from rtal.entities.exceptions import ECheckpointMismatch
from rtal.entities.experiment.repository import IRunRepository
from rtal.entities.experiment.schema import ExperimentConfig
from rtal.entities.metrics.repository import IMetricLogRepository
from rtal.entities.metrics.schema import MetricRecord
from rtal.entities.model.schema import PAD_ID
from rtal.entities.model.seq2seq import Seq2SeqModel, build, forward_train
from rtal.entities.nn.losses import label_smoothed_ce, token_accuracy
from rtal.entities.task.generator import generate_task
from rtal.entities.task.schema import Split
from rtal.entities.tensor.tensor import Tensor
from rtal.entities.training.batching import DataStream, Pair
from rtal.entities.training.optimizer import AdamState, adam_step, lr_schedule

logger = logging.getLogger(__name__)


class TrainingResult(BaseModel):
    run_dir: str
    final_step: int
    final_loss: Optional[float] = None
    token_accuracy: Optional[float] = None
    valid_exact_match: Optional[float] = None


def evaluate_exact_match(model: Seq2SeqModel, pairs: List[Pair], max_len: int) -> float:
    """Greedy-decoded exact-sequence accuracy."""
    outputs = [strip_eos(greedy_decode(model, source, max_len).tokens) for source, _ in pairs]
    return exact_match(outputs, [target for _, target in pairs])


@inject
@dataclass
class TrainingUseCase():
    run_repository: IRunRepository
    checkpoint_repository: ICheckpointRepository
    metric_repository: IMetricLogRepository

    def _checkpoint(self, run_dir: Path, model: Seq2SeqModel, state: AdamState, step: int) -> None:
        checkpoint = Checkpoint(step=step, config_digest=model.config.digest(),
                                params={**model.state_dict(), **state.to_records()})
        path = self.checkpoint_repository.save(run_dir, checkpoint)
        logger.info(f"step {step}: checkpoint written to {path}")

    def _restore(self, run_dir: Path, model: Seq2SeqModel, state: AdamState) -> int:
        steps = self.checkpoint_repository.list_steps(run_dir)
        if not steps:
            raise EInvalidConfig(f"{run_dir} has no checkpoint to resume from")
        checkpoint = self.checkpoint_repository.load_step(run_dir, steps[-1])
        if checkpoint.config_digest != model.config.digest():
            raise ECheckpointMismatch(f"checkpoint at step {checkpoint.step} was written for a different model config")
        model.load_state_dict(checkpoint.model_params)
        state.load_records(checkpoint.optimizer_params, checkpoint.step)
        self.metric_repository.truncate_after(run_dir, checkpoint.step)
        logger.info(f"resumed from step {checkpoint.step}")
        return checkpoint.step

    def _prepare_run_dir(self, config: ExperimentConfig, run_dir: Path, resume: bool) -> None:
        if resume:
            return
        if self.checkpoint_repository.list_steps(run_dir):
            raise EInvalidConfig(f"{run_dir} already holds checkpoints; resume it or choose another output_dir")
        self.run_repository.save_config(run_dir, config)
        self.metric_repository.truncate_after(run_dir, 0)

    def _loss(self, config: ExperimentConfig, model: Seq2SeqModel, stream: DataStream,
              step: int) -> Tuple[Tensor, float]:
        batch = stream.batch_for_step(step)
        rng = np.random.default_rng([config.seed, step])
        logits = forward_train(model, batch, rng)
        loss = label_smoothed_ce(logits, batch.target_out, config.training.label_smoothing, PAD_ID)
        return loss, token_accuracy(logits, batch.target_out, PAD_ID)

    def _gradients(self, model: Seq2SeqModel) -> Dict[str, np.ndarray]:
        return {name: tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
                for name, tensor in model.named_parameters()}

    def train(self, config: ExperimentConfig, run_dir: Path, resume: bool = False) -> TrainingResult:
        run_dir = Path(run_dir)
        training = config.training
        self._prepare_run_dir(config, run_dir, resume)
        logger.info(f"run {config.name} in {run_dir}: model digest {config.model.digest()}")

        model = build(config.model)
        state = AdamState(beta1=training.beta1, beta2=training.beta2, eps=training.adam_eps)
        stream = DataStream(generate_task(config.task, Split.TRAIN, config.task.train_size, config.seed),
                            training.tokens_per_batch, config.seed)
        valid = generate_task(config.task, Split.VALID, config.task.valid_size, config.seed)[:training.eval_size]
        decode_len = config.task.max_len + 1

        if resume:
            start = self._restore(run_dir, model, state) + 1
        else:
            self._checkpoint(run_dir, model, state, 0)
            start = 1

        result = TrainingResult(run_dir=str(run_dir), final_step=start - 1)
        interval_start = time.perf_counter()
        for step in range(start, training.steps + 1):
            model.zero_grad()
            loss, accuracy = self._loss(config, model, stream, step)
            value = loss.item()
            if not np.isfinite(value):
                logger.error(f"step {step}: loss is {value}; keeping the last good checkpoint")
                raise ETrainingDiverged(f"loss became {value} at step {step}")
            loss.backward()
            lr = lr_schedule(step, config.model.d_model, training.warmup, training.lr_scale)
            adam_step(state, model.parameters(), self._gradients(model), lr)

            last = step == training.steps
            evaluated = None
            if training.eval_every and (step % training.eval_every == 0 or last):
                evaluated = evaluate_exact_match(model, valid, decode_len)
            result = TrainingResult(run_dir=str(run_dir), final_step=step, final_loss=value, token_accuracy=accuracy,
                                    valid_exact_match=evaluated if evaluated is not None else result.valid_exact_match)
            if step % training.log_every == 0 or last:
                wall_ms = (time.perf_counter() - interval_start) * 1000.0
                record = MetricRecord(step=step, loss=value, token_accuracy=accuracy, lr=lr, wall_ms=wall_ms,
                                      valid_exact_match=evaluated)
                self.metric_repository.append(run_dir, record)
                logger.info(f"step {step}: loss {value:.4f} token_accuracy {accuracy:.4f} lr {lr:.3e}"
                            + (f" valid_exact_match {record.valid_exact_match:.4f}"
                               if record.valid_exact_match is not None else ""))
                interval_start = time.perf_counter()
            if step % training.checkpoint_every == 0 or last:
                self._checkpoint(run_dir, model, state, step)

        return result

    def resume(self, run_dir: Path, steps: Optional[int] = None) -> TrainingResult:
        config = self.run_repository.load_config(run_dir)
        if steps is not None:
            config = config.copy(update={'training': config.training.copy(update={'steps': steps})})
            self.run_repository.save_config(run_dir, config)
        return self.train(config, run_dir, resume=True)
