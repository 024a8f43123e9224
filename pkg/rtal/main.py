import sys
from typing import Optional, Sequence

from rtal.infrastructure.config import DefaultConfig

DefaultConfig.cap_threads()

from injector import Injector  # noqa: E402

from rtal.adapters.endpoints import cli  # noqa: E402
from rtal.adapters.gateway.filesystem.repository.checkpoint_repository import CheckpointRepository  # noqa: E402
from rtal.adapters.gateway.filesystem.repository.metric_log_repository import MetricLogRepository  # noqa: E402
from rtal.adapters.gateway.filesystem.repository.run_repository import RunRepository  # noqa: E402
from rtal.adapters.gateway.filesystem.run_directory import RunDirectory  # noqa: E402
from rtal.business_rules.use_cases.ablation_use_case import AblationUseCase  # noqa: E402
from rtal.business_rules.use_cases.checkpoint_use_case import CheckpointUseCase  # noqa: E402
from rtal.business_rules.use_cases.decoding_use_case import DecodingUseCase  # noqa: E402
from rtal.business_rules.use_cases.gradcheck_use_case import GradcheckUseCase  # noqa: E402
from rtal.business_rules.use_cases.params_use_case import ParamsUseCase  # noqa: E402
from rtal.business_rules.use_cases.training_use_case import TrainingUseCase  # noqa: E402
from rtal.entities.checkpoint.repository import ICheckpointRepository  # noqa: E402
from rtal.entities.experiment.repository import IRunRepository  # noqa: E402
from rtal.entities.metrics.repository import IMetricLogRepository  # noqa: E402


def configure(binder):

    # filesystem session
    binder.bind(RunDirectory, to=RunDirectory)

    # repositories
    binder.bind(IRunRepository, to=RunRepository)
    binder.bind(ICheckpointRepository, to=CheckpointRepository)
    binder.bind(IMetricLogRepository, to=MetricLogRepository)

    # use cases
    binder.bind(TrainingUseCase, to=TrainingUseCase)
    binder.bind(CheckpointUseCase, to=CheckpointUseCase)
    binder.bind(DecodingUseCase, to=DecodingUseCase)
    binder.bind(AblationUseCase, to=AblationUseCase)
    binder.bind(ParamsUseCase, to=ParamsUseCase)
    binder.bind(GradcheckUseCase, to=GradcheckUseCase)


injector = Injector([configure])


def main(argv: Optional[Sequence[str]] = None) -> int:
    DefaultConfig.init_logging()
    return cli.run(cli.build(injector=injector), argv)


if __name__ == "__main__":
    sys.exit(main())
