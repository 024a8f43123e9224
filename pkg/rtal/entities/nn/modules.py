import math
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from rtal.entities.exceptions import ECheckpointMismatch
from rtal.entities.tensor.functional import add, embedding_lookup, layer_norm, matmul, relu
from rtal.entities.tensor.tensor import Tensor, parameter


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, dtype) -> np.ndarray:
    bound = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out)).astype(dtype)


class Module():
    """Parameter container; parameters are discovered from attributes in definition order."""

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Tensor]]:
        for name, value in vars(self).items():
            path = f"{prefix}{name}"
            if isinstance(value, Tensor) and value.requires_grad:
                yield path, value
            elif isinstance(value, Module):
                yield from value.named_parameters(f"{path}.")
            elif isinstance(value, (list, tuple)):
                for index, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{path}.{index}.")

    def parameters(self) -> Dict[str, Tensor]:
        return dict(self.named_parameters())

    def num_parameters(self) -> int:
        return sum(tensor.size for _, tensor in self.named_parameters())

    def zero_grad(self) -> None:
        for _, tensor in self.named_parameters():
            tensor.zero_grad()

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: tensor.data.copy() for name, tensor in self.named_parameters()}

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        own = self.parameters()
        if set(own) != set(state):
            missing = sorted(set(own) - set(state))
            unexpected = sorted(set(state) - set(own))
            raise ECheckpointMismatch(f"parameter names differ; missing={missing} unexpected={unexpected}")
        for name, tensor in own.items():
            value = np.asarray(state[name])
            if value.shape != tensor.shape:
                raise ECheckpointMismatch(f"{name}: expected shape {tensor.shape}, got {value.shape}")
            tensor.data = value.astype(tensor.dtype, copy=True)


class Linear(Module):
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator,
                 dtype=np.float32, bias: bool = True) -> None:
        self.weight = parameter(glorot_uniform(rng, in_dim, out_dim, dtype))
        self.bias = parameter(np.zeros(out_dim, dtype=dtype)) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        out = matmul(x, self.weight)
        return add(out, self.bias) if self.bias is not None else out


class LayerNorm(Module):
    def __init__(self, width: int, eps: float = 1e-6, dtype=np.float32) -> None:
        self.gamma = parameter(np.ones(width, dtype=dtype))
        self.beta_shift = parameter(np.zeros(width, dtype=dtype))
        self.eps = eps

    def __call__(self, x: Tensor) -> Tensor:
        return layer_norm(x, self.gamma, self.beta_shift, self.eps)


class PositionwiseFFN(Module):
    """max(0, xW1 + b1)W2 + b2, applied independently at every position."""

    def __init__(self, in_dim: int, hidden_dim: int, rng: np.random.Generator,
                 dtype=np.float32, out_dim: Optional[int] = None) -> None:
        self.inner = Linear(in_dim, hidden_dim, rng, dtype)
        self.outer = Linear(hidden_dim, out_dim or in_dim, rng, dtype)

    def __call__(self, x: Tensor) -> Tensor:
        return self.outer(relu(self.inner(x)))


def position_ffn(layer: PositionwiseFFN, x: Tensor) -> Tensor:
    return layer(x)


class Embedding(Module):
    def __init__(self, vocab_size: int, d_model: int, rng: np.random.Generator, dtype=np.float32) -> None:
        self.table = parameter(rng.normal(0.0, d_model ** -0.5, size=(vocab_size, d_model)).astype(dtype))

    def __call__(self, ids: np.ndarray) -> Tensor:
        return embedding_lookup(self.table, ids)


def sinusoidal_positions(max_len: int, d_model: int, dtype=np.float32) -> np.ndarray:
    positions = np.arange(max_len)[:, None]
    rates = np.power(10000.0, -(np.arange(0, d_model, 2) / d_model))
    table = np.zeros((max_len, d_model))
    table[:, 0::2] = np.sin(positions * rates)
    table[:, 1::2] = np.cos(positions * rates[: d_model // 2])
    return table.astype(dtype)
