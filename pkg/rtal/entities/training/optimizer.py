from typing import Dict

import numpy as np
from pydantic import BaseModel, confloat, conint

from rtal.entities.checkpoint.schema import OPTIMIZER_PREFIX
from rtal.entities.exceptions import ENanGradient, EShapeMismatch
from rtal.entities.tensor.tensor import Tensor


class AdamState(BaseModel):
    beta1: confloat(ge=0.0, lt=1.0) = 0.9
    beta2: confloat(ge=0.0, lt=1.0) = 0.98
    eps: confloat(gt=0.0) = 1e-9
    step: conint(ge=0) = 0
    m: Dict[str, np.ndarray] = {}
    v: Dict[str, np.ndarray] = {}

    class Config:
        arbitrary_types_allowed = True

    def to_records(self) -> Dict[str, np.ndarray]:
        records = {f"{OPTIMIZER_PREFIX}m.{name}": value for name, value in self.m.items()}
        records.update({f"{OPTIMIZER_PREFIX}v.{name}": value for name, value in self.v.items()})
        return records

    def load_records(self, records: Dict[str, np.ndarray], step: int) -> None:
        for name, value in records.items():
            kind, _, param = name[len(OPTIMIZER_PREFIX):].partition('.')
            getattr(self, kind)[param] = value.copy()
        self.step = step


def adam_step(state: AdamState, params: Dict[str, Tensor], grads: Dict[str, np.ndarray], lr: float) -> None:
    """
    One bias-corrected Adam update applied in place to `params`.

    Every gradient is checked before any parameter moves, so a NaN aborts the
    step with the model and the moments untouched.
    """
    for name, tensor in params.items():
        if name not in grads:
            raise EShapeMismatch(f"no gradient for parameter '{name}'")
        if grads[name].shape != tensor.shape:
            raise EShapeMismatch(f"gradient for '{name}' has shape {grads[name].shape}, expected {tensor.shape}")
        if not np.isfinite(grads[name]).all():
            raise ENanGradient(f"non-finite gradient in parameter '{name}' at step {state.step + 1}")

    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step
    for name, tensor in params.items():
        grad = grads[name].astype(tensor.dtype)
        m = state.m.get(name, np.zeros_like(tensor.data))
        v = state.v.get(name, np.zeros_like(tensor.data))
        m = state.beta1 * m + (1.0 - state.beta1) * grad
        v = state.beta2 * v + (1.0 - state.beta2) * grad * grad
        state.m[name] = m.astype(tensor.dtype)
        state.v[name] = v.astype(tensor.dtype)
        update = lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)
        tensor.data = (tensor.data - update).astype(tensor.dtype)


def lr_schedule(step: int, d_model: int, warmup: int, scale: float = 1.0) -> float:
    """Linear warmup for `warmup` steps, then inverse square-root decay."""
    if step < 1 or warmup < 1:
        raise ValueError(f"step and warmup must be >= 1, got step={step} warmup={warmup}")
    return scale * d_model ** -0.5 * min(step ** -0.5, step * warmup ** -1.5)
