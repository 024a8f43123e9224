import numpy as np
import pytest

from rtal.business_rules.exceptions.checkpoint_exceptions import ENotEnoughCheckpoints, ERunNotFound
from rtal.business_rules.use_cases.checkpoint_use_case import CheckpointUseCase
from rtal.business_rules.use_cases.training_use_case import TrainingUseCase
from rtal.entities.checkpoint.repository import ICheckpointRepository
from rtal.entities.exceptions import ECheckpointMismatch
from rtal.entities.experiment.repository import IRunRepository
from tests.use_cases.experiments import with_training


@pytest.fixture()
def trained_run(injector, tiny_config, tmp_path):
    injector.get(TrainingUseCase).train(with_training(tiny_config, steps=6), tmp_path)
    return tmp_path


def test_should_skip_the_initial_checkpoint(injector, trained_run):
    assert injector.get(CheckpointUseCase).trained_steps(trained_run) == [2, 4, 6]


def test_should_average_a_single_checkpoint_into_itself(injector, trained_run):
    checkpoint_use_case = injector.get(CheckpointUseCase)
    repository = injector.get(ICheckpointRepository)
    checkpoint_use_case.average(trained_run, 1)
    averaged, last = repository.load_average(trained_run), repository.load_step(trained_run, 6)

    assert averaged.step == 6
    assert sorted(averaged.params) == sorted(last.model_params)
    for name, value in last.model_params.items():
        assert np.array_equal(averaged.params[name], value)


def test_should_average_the_last_k_checkpoints(injector, trained_run):
    repository = injector.get(ICheckpointRepository)
    injector.get(CheckpointUseCase).average(trained_run, 2)
    averaged = repository.load_average(trained_run)
    expected = (repository.load_step(trained_run, 4).params['embedding.table'].astype(np.float64)
                + repository.load_step(trained_run, 6).params['embedding.table']) / 2.0

    assert np.allclose(averaged.params['embedding.table'], expected, atol=1e-7)


def test_should_fail_when_asking_for_more_checkpoints_than_trained(injector, trained_run):
    with pytest.raises(ENotEnoughCheckpoints) as execinfo:
        injector.get(CheckpointUseCase).average(trained_run, 4)

    assert "3 trained checkpoint(s), 4 requested" in str(execinfo.value)


def test_should_prefer_the_averaged_checkpoint_for_evaluation(injector, trained_run):
    checkpoint_use_case = injector.get(CheckpointUseCase)

    assert 'adam.m.embedding.table' in checkpoint_use_case.evaluation_checkpoint(trained_run).params
    checkpoint_use_case.average(trained_run, 2)
    assert 'adam.m.embedding.table' not in checkpoint_use_case.evaluation_checkpoint(trained_run).params
    assert 'adam.m.embedding.table' in checkpoint_use_case.evaluation_checkpoint(trained_run, False).params


def test_should_load_a_model_with_the_checkpoint_parameters(injector, trained_run):
    model = injector.get(CheckpointUseCase).load_model(trained_run, use_average=False)
    last = injector.get(ICheckpointRepository).load_step(trained_run, 6)

    assert np.array_equal(model.embedding.table.data, last.params['embedding.table'])


def test_should_fail_when_the_config_no_longer_matches(injector, trained_run, tiny_config):
    changed = tiny_config.copy(update={'model': tiny_config.model.copy(update={'d_ff': 32})})
    injector.get(IRunRepository).save_config(trained_run, changed)
    with pytest.raises(ECheckpointMismatch):
        injector.get(CheckpointUseCase).load_model(trained_run)


def test_should_fail_on_a_run_without_checkpoints(injector, tmp_path):
    with pytest.raises(ERunNotFound):
        injector.get(CheckpointUseCase).evaluation_checkpoint(tmp_path)
