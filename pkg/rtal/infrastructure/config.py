import logging
import os

from decouple import config
from logging import Logger

THREAD_ENV_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


class DefaultConfig():
    LOG_LEVEL = config("RTAL_LOG_LEVEL", default="INFO")
    NUM_THREADS = config("RTAL_NUM_THREADS", cast=int, default=1)
    DEBUG_FINITE = config("RTAL_DEBUG_FINITE", cast=bool, default=False)
    RUNS_DIR = config("RTAL_RUNS_DIR", default="runs")
    CHECKPOINT_PREFIX = config("RTAL_CHECKPOINT_PREFIX", default="checkpoint")
    AVERAGE_LAST = config("RTAL_AVERAGE_LAST", cast=int, default=5)
    BEAM_SIZE = config("RTAL_BEAM_SIZE", cast=int, default=4)
    LENGTH_PENALTY = config("RTAL_LENGTH_PENALTY", cast=float, default=0.6)
    ABLATION_WORKERS = config("RTAL_ABLATION_WORKERS", cast=int, default=1)

    @staticmethod
    def cap_threads() -> None:
        # must run before numpy is first imported to take effect
        for name in THREAD_ENV_VARS:
            os.environ.setdefault(name, str(DefaultConfig.NUM_THREADS))

    @staticmethod
    def init_logging() -> Logger:
        logging.basicConfig(format='%(asctime)s - %(levelname)s - %(message)s',
                            level=DefaultConfig.LOG_LEVEL)

        logger = logging.getLogger()
        logger.setLevel(DefaultConfig.LOG_LEVEL)

        return logger
