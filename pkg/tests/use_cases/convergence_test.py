import json
from pathlib import Path

import pytest

from rtal.business_rules.use_cases.checkpoint_use_case import CheckpointUseCase
from rtal.business_rules.use_cases.training_use_case import TrainingUseCase, evaluate_exact_match
from rtal.entities.aggregation.schema import AggStructure
from rtal.entities.experiment.schema import ExperimentConfig
from rtal.entities.metrics.repository import IMetricLogRepository
from rtal.entities.task.generator import generate_task
from rtal.entities.task.schema import Split
from tests.use_cases.experiments import with_aggregation, with_training

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


def _load(name):
    return ExperimentConfig(**json.loads((CONFIGS / name).read_text(encoding="utf-8")))


@pytest.mark.slow
@pytest.mark.parametrize("structure", list(AggStructure))
def test_should_lower_the_copy_loss_for_every_structure(injector, tmp_path, structure):
    config = with_training(with_aggregation(_load("copy_toy.json"), structure=structure),
                           steps=500, log_every=1, checkpoint_every=500, eval_every=None)
    injector.get(TrainingUseCase).train(config, tmp_path)
    records = injector.get(IMetricLogRepository).read(tmp_path)

    assert records[-1].loss < records[0].loss


@pytest.mark.slow
@pytest.mark.parametrize("name", ["copy_toy.json", "copy_toy_rtal.json"])
def test_should_learn_to_copy_held_out_sequences(injector, tmp_path, name):
    config = _load(name)
    injector.get(TrainingUseCase).train(config, tmp_path)
    injector.get(CheckpointUseCase).average(tmp_path, 3)
    model = injector.get(CheckpointUseCase).load_model(tmp_path)
    test = generate_task(config.task, Split.TEST, 200, config.seed)

    assert evaluate_exact_match(model, test, config.task.max_len + 1) >= 0.99
