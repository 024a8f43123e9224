import pytest
from injector import Injector

from rtal.adapters.gateway.filesystem.repository.checkpoint_repository import CheckpointRepository
from rtal.adapters.gateway.filesystem.repository.metric_log_repository import MetricLogRepository
from rtal.adapters.gateway.filesystem.repository.run_repository import RunRepository
from rtal.adapters.gateway.filesystem.run_directory import RunDirectory
from rtal.entities.checkpoint.repository import ICheckpointRepository
from rtal.entities.experiment.repository import IRunRepository
from rtal.entities.metrics.repository import IMetricLogRepository
from tests.use_cases.experiments import tiny_experiment


def configure(binder):

    # filesystem session
    binder.bind(RunDirectory, to=RunDirectory)

    # repositories
    binder.bind(IRunRepository, to=RunRepository)
    binder.bind(ICheckpointRepository, to=CheckpointRepository)
    binder.bind(IMetricLogRepository, to=MetricLogRepository)


@pytest.fixture()
def injector():
    return Injector([configure])


@pytest.fixture()
def tiny_config():
    return tiny_experiment()
