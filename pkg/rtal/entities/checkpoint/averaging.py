from typing import Dict, Sequence

import numpy as np

from rtal.entities.checkpoint.schema import Checkpoint
from rtal.entities.exceptions import ECheckpointMismatch


def _check_compatible(checkpoints: Sequence[Checkpoint]) -> None:
    reference = checkpoints[0].model_params
    for checkpoint in checkpoints[1:]:
        if checkpoint.config_digest != checkpoints[0].config_digest:
            raise ECheckpointMismatch(
                f"checkpoint at step {checkpoint.step} was written for a different model config")
        params = checkpoint.model_params
        if set(params) != set(reference):
            raise ECheckpointMismatch(f"checkpoint at step {checkpoint.step} has different parameter names: "
                                      f"{sorted(set(params) ^ set(reference))}")
        for name, value in params.items():
            if value.shape != reference[name].shape:
                raise ECheckpointMismatch(
                    f"{name}: shape {value.shape} at step {checkpoint.step} differs from {reference[name].shape}")


def average_checkpoints(checkpoints: Sequence[Checkpoint]) -> Checkpoint:
    """
    Element-wise arithmetic mean of the model parameters; the step is the latest input step.

    Values are sorted along the checkpoint axis before summing so the result
    does not depend on the order of the inputs. Optimizer records are dropped.
    """
    if not checkpoints:
        raise ECheckpointMismatch("cannot average an empty list of checkpoints")
    _check_compatible(checkpoints)

    averaged: Dict[str, np.ndarray] = {}
    for name, first in checkpoints[0].model_params.items():
        stacked = np.stack([checkpoint.params[name] for checkpoint in checkpoints]).astype(np.float64)
        averaged[name] = (np.sort(stacked, axis=0).sum(axis=0) / len(checkpoints)).astype(first.dtype)

    return Checkpoint(step=max(checkpoint.step for checkpoint in checkpoints),
                      config_digest=checkpoints[0].config_digest,
                      params=averaged)
