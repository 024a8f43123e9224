import numpy as np
import pytest

from rtal.business_rules.exceptions.experiment_exceptions import EInvalidConfig
from rtal.business_rules.exceptions.training_exceptions import ETrainingDiverged
from rtal.business_rules.use_cases.training_use_case import TrainingUseCase
from rtal.entities.aggregation.schema import AggStructure
from rtal.entities.checkpoint.repository import ICheckpointRepository
from rtal.entities.experiment.repository import IRunRepository
from rtal.entities.metrics.repository import IMetricLogRepository
from rtal.entities.metrics.schema import MetricRecord
from tests.use_cases.experiments import with_aggregation, with_training


def _final_params(injector, run_dir):
    repository = injector.get(ICheckpointRepository)
    return repository.load_step(run_dir, repository.list_steps(run_dir)[-1]).params


def test_should_write_only_the_initial_checkpoint_for_zero_steps(injector, tiny_config, tmp_path):
    result = injector.get(TrainingUseCase).train(with_training(tiny_config, steps=0), tmp_path)

    assert result.final_step == 0
    assert injector.get(ICheckpointRepository).list_steps(tmp_path) == [0]
    assert injector.get(IMetricLogRepository).read(tmp_path) == []
    assert injector.get(IRunRepository).load_config(tmp_path).training.steps == 0


def test_should_log_and_checkpoint_on_schedule(injector, tiny_config, tmp_path):
    config = with_training(tiny_config, steps=7, log_every=3, checkpoint_every=4)
    result = injector.get(TrainingUseCase).train(config, tmp_path)
    records = injector.get(IMetricLogRepository).read(tmp_path)

    assert result.final_step == 7
    assert [record.step for record in records] == [3, 6, 7]
    assert injector.get(ICheckpointRepository).list_steps(tmp_path) == [0, 4, 7]
    assert all(np.isfinite(record.loss) and record.lr > 0 for record in records)
    assert result.final_loss == records[-1].loss


def test_should_reproduce_a_run_from_the_same_config(injector, tiny_config, tmp_path):
    config = with_aggregation(tiny_config, structure=AggStructure.RTAL)
    training_use_case = injector.get(TrainingUseCase)
    training_use_case.train(config, tmp_path / "a")
    training_use_case.train(config, tmp_path / "b")
    metrics = injector.get(IMetricLogRepository)

    first, second = _final_params(injector, tmp_path / "a"), _final_params(injector, tmp_path / "b")
    for name, value in first.items():
        assert np.array_equal(value, second[name]), name
    assert ([record.reproducible() for record in metrics.read(tmp_path / "a")]
            == [record.reproducible() for record in metrics.read(tmp_path / "b")])


def test_should_resume_to_the_same_result_as_an_uninterrupted_run(injector, tiny_config, tmp_path):
    config = with_aggregation(tiny_config, structure=AggStructure.RTAL)
    training_use_case = injector.get(TrainingUseCase)
    training_use_case.train(config, tmp_path / "straight")
    training_use_case.train(with_training(config, steps=4), tmp_path / "resumed")
    result = training_use_case.resume(tmp_path / "resumed", steps=8)
    metrics = injector.get(IMetricLogRepository)

    assert result.final_step == 8
    straight, resumed = _final_params(injector, tmp_path / "straight"), _final_params(injector, tmp_path / "resumed")
    assert sorted(straight) == sorted(resumed)
    for name, value in straight.items():
        assert np.array_equal(value, resumed[name]), name
    assert ([record.reproducible() for record in metrics.read(tmp_path / "straight")]
            == [record.reproducible() for record in metrics.read(tmp_path / "resumed")])


def test_should_drop_metrics_logged_after_the_resumed_checkpoint(injector, tiny_config, tmp_path):
    training_use_case = injector.get(TrainingUseCase)
    training_use_case.train(with_training(tiny_config, steps=6, checkpoint_every=4, log_every=1), tmp_path)
    (tmp_path / "checkpoint_00000006.rtal").unlink()
    training_use_case.resume(tmp_path, steps=6)
    steps = [record.step for record in injector.get(IMetricLogRepository).read(tmp_path)]

    assert steps == [1, 2, 3, 4, 5, 6]


def test_should_refuse_to_overwrite_an_existing_run(injector, tiny_config, tmp_path):
    training_use_case = injector.get(TrainingUseCase)
    training_use_case.train(with_training(tiny_config, steps=0), tmp_path)
    with pytest.raises(EInvalidConfig) as execinfo:
        training_use_case.train(with_training(tiny_config, steps=0), tmp_path)

    assert "already holds checkpoints" in str(execinfo.value)


def test_should_record_validation_exact_match_at_eval_steps(injector, tiny_config, tmp_path):
    config = with_training(tiny_config, steps=4, eval_every=4, log_every=2)
    result = injector.get(TrainingUseCase).train(config, tmp_path)
    records = injector.get(IMetricLogRepository).read(tmp_path)

    assert records[0].valid_exact_match is None
    assert 0.0 <= records[1].valid_exact_match <= 1.0
    assert result.valid_exact_match == records[1].valid_exact_match


def test_should_stop_when_the_loss_diverges(injector, tiny_config, tmp_path, monkeypatch):
    monkeypatch.setattr("rtal.business_rules.use_cases.training_use_case.lr_schedule",
                        lambda *args, **kwargs: np.inf)
    with np.errstate(all="ignore"):
        with pytest.raises(ETrainingDiverged) as execinfo:
            injector.get(TrainingUseCase).train(tiny_config, tmp_path)

    assert "at step 2" in str(execinfo.value)
    assert injector.get(ICheckpointRepository).list_steps(tmp_path) == [0]


def test_should_discard_stale_metrics_when_starting_from_scratch(injector, tiny_config, tmp_path):
    metrics = injector.get(IMetricLogRepository)
    metrics.append(tmp_path, MetricRecord(step=99, loss=1.0, token_accuracy=0.0, lr=1e-3, wall_ms=1.0))
    injector.get(TrainingUseCase).train(with_training(tiny_config, steps=2, log_every=1), tmp_path)

    assert [record.step for record in metrics.read(tmp_path)] == [1, 2]
