"""
Dense tensor with reverse-mode automatic differentiation.

Every differentiable operation goes through `apply_op`, which records the
inputs and a backward rule on the output when any input requires a gradient.
`Tape.from_loss` recovers the executed operations in topological order and
`Tape.backward` walks them in reverse, accumulating gradients across fan-out.
"""

import threading
import weakref
from contextlib import contextmanager
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from rtal.entities.exceptions import ENonFiniteValue, ENonScalarLoss
from rtal.infrastructure.config import DefaultConfig

BackwardRule = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]

_state = threading.local()


def default_dtype() -> np.dtype:
    return getattr(_state, "dtype", np.dtype(np.float32))


def grad_enabled() -> bool:
    return getattr(_state, "grad_enabled", True)


@contextmanager
def precision(dtype):
    """Switch the default floating dtype for tensors created in this thread."""
    previous = default_dtype()
    _state.dtype = np.dtype(dtype)
    try:
        yield
    finally:
        _state.dtype = previous


@contextmanager
def no_grad():
    previous = grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


class TapeEntry():
    __slots__ = ("inputs", "output", "backward_rule")

    def __init__(self, inputs: Tuple["Tensor", ...], output: "Tensor", backward_rule: BackwardRule) -> None:
        self.inputs = inputs
        self.output = weakref.ref(output)
        self.backward_rule = backward_rule


class Tensor():
    __slots__ = ("data", "requires_grad", "grad", "_entry", "__weakref__")

    def __init__(self, data, requires_grad: bool = False, dtype=None) -> None:
        if dtype is None:
            is_float_array = isinstance(data, np.ndarray) and data.dtype.kind == "f"
            dtype = data.dtype if is_float_array else default_dtype()
        self.data: np.ndarray = np.asarray(data, dtype=dtype)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self._entry: Optional[TapeEntry] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        Tape.from_loss(self).backward(self)

    def __add__(self, other: "Tensor") -> "Tensor":
        from rtal.entities.tensor.functional import add
        return add(self, other)

    def __sub__(self, other: "Tensor") -> "Tensor":
        from rtal.entities.tensor.functional import sub
        return sub(self, other)

    def __mul__(self, other: "Tensor") -> "Tensor":
        from rtal.entities.tensor.functional import mul_elementwise
        return mul_elementwise(self, other)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        from rtal.entities.tensor.functional import matmul
        return matmul(self, other)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, requires_grad={self.requires_grad})"


def parameter(data, dtype=None) -> Tensor:
    return Tensor(data, requires_grad=True, dtype=dtype)


def apply_op(data: np.ndarray, inputs: Sequence[Tensor], backward_rule: BackwardRule) -> Tensor:
    """Wrap an op result, recording it on the tape when any input needs a gradient."""
    if DefaultConfig.DEBUG_FINITE and not np.all(np.isfinite(data)):
        raise ENonFiniteValue(f"non-finite value produced by {getattr(backward_rule, '__qualname__', 'op')}")

    output = Tensor(data)
    if grad_enabled() and any(tensor.requires_grad for tensor in inputs):
        output.requires_grad = True
        output._entry = TapeEntry(tuple(inputs), output, backward_rule)
    return output


class Tape():
    """Executed operations leading to a loss, inputs always before outputs."""

    def __init__(self, entries: List[TapeEntry]) -> None:
        self.entries = entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[TapeEntry]:
        return iter(self.entries)

    @classmethod
    def from_loss(cls, loss: Tensor) -> "Tape":
        entries: List[TapeEntry] = []
        visited = set()
        stack = [(loss, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                entries.append(node._entry)
                continue
            if id(node) in visited or node._entry is None:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._entry.inputs:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
        return cls(entries)

    def backward(self, loss: Tensor) -> None:
        if loss.shape != ():
            raise ENonScalarLoss(f"backward needs a scalar loss, got shape {loss.shape}")

        grads = {id(loss): np.ones_like(loss.data)}
        reached = {id(loss): loss}
        for entry in reversed(self.entries):
            grad = grads.get(id(entry.output()))
            if grad is None:
                continue
            for parent, parent_grad in zip(entry.inputs, entry.backward_rule(grad)):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                grads[key] = grads[key] + parent_grad if key in grads else parent_grad
                reached[key] = parent

        for key, tensor in reached.items():
            grad = np.asarray(grads[key], dtype=tensor.dtype)
            tensor.grad = grad if tensor.grad is None else tensor.grad + grad
