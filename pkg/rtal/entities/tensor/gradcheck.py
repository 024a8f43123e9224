from typing import Callable, Dict, Optional

import numpy as np

from rtal.entities.tensor.functional import mul_elementwise, sum_all
from rtal.entities.tensor.tensor import Tensor, no_grad, precision

DEFAULT_STEP = 1e-5
DEFAULT_FLOOR = 1e-8


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = DEFAULT_FLOOR) -> float:
    if analytic.size == 0:
        return 0.0
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / scale))


class _ScalarProjection():
    """Reduces any tensor function to a scalar with a fixed random projection."""

    def __init__(self, f: Callable[[Tensor], Tensor], seed: int) -> None:
        self.f = f
        self.seed = seed
        self.projection: Optional[np.ndarray] = None

    def __call__(self, x: Tensor) -> Tensor:
        out = self.f(x)
        if out.shape == ():
            return out
        if self.projection is None:
            self.projection = np.random.default_rng(self.seed).standard_normal(out.shape)
        return sum_all(mul_elementwise(out, Tensor(self.projection, dtype=np.float64)))


def grad_check(f: Callable[[Tensor], Tensor], x: Tensor, step: float = DEFAULT_STEP,
               floor: float = DEFAULT_FLOOR, seed: int = 0) -> float:
    """Max relative error between backward() and central differences of `f` at `x`."""
    origin = np.array(x.data, dtype=np.float64)
    projected = _ScalarProjection(f, seed)

    with precision(np.float64):
        point = Tensor(origin.copy(), requires_grad=True)
        projected(point).backward()
        analytic = point.grad

        numeric = np.zeros_like(origin)
        with no_grad():
            for index in np.ndindex(origin.shape):
                shifted = origin.copy()
                shifted[index] = origin[index] + step
                upper = projected(Tensor(shifted)).item()
                shifted[index] = origin[index] - step
                lower = projected(Tensor(shifted)).item()
                numeric[index] = (upper - lower) / (2.0 * step)

    return relative_error(analytic, numeric, floor)


def grad_check_parameters(loss_fn: Callable[[], Tensor], parameters: Dict[str, Tensor],
                          step: float = DEFAULT_STEP, floor: float = DEFAULT_FLOOR) -> Dict[str, float]:
    """Per-parameter max relative error of a scalar loss closure over float64 parameters."""
    for tensor in parameters.values():
        tensor.zero_grad()
    loss_fn().backward()

    errors = {}
    with no_grad():
        for name, tensor in parameters.items():
            analytic = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
            numeric = np.zeros_like(tensor.data)
            for index in np.ndindex(tensor.shape):
                original = tensor.data[index]
                tensor.data[index] = original + step
                upper = loss_fn().item()
                tensor.data[index] = original - step
                lower = loss_fn().item()
                tensor.data[index] = original
                numeric[index] = (upper - lower) / (2.0 * step)
            errors[name] = relative_error(analytic, numeric, floor)
    return errors
