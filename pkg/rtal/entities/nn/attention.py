import math
from typing import Optional

import numpy as np

from rtal.entities.exceptions import EInvalidModelConfig, EShapeMismatch
from rtal.entities.nn.modules import Linear, Module
from rtal.entities.tensor.functional import matmul, permute, reshape, scale, softmax_last_dim, transpose_last_two
from rtal.entities.tensor.tensor import Tensor


def scaled_dot_attention(q: Tensor, k: Tensor, v: Tensor, mask: Optional[np.ndarray] = None) -> Tensor:
    # scaled by the per-head key width
    scores = scale(matmul(q, transpose_last_two(k)), 1.0 / math.sqrt(q.shape[-1]))
    return matmul(softmax_last_dim(scores, mask), v)


class MultiHeadAttention(Module):
    def __init__(self, d_model: int, num_heads: int, rng: np.random.Generator, dtype=np.float32) -> None:
        if d_model % num_heads:
            raise EInvalidModelConfig(f"d_model={d_model} is not divisible by num_heads={num_heads}")
        self.num_heads = num_heads
        self.head_dim = d_model // num_heads
        self.w_q = Linear(d_model, d_model, rng, dtype, bias=False)
        self.w_k = Linear(d_model, d_model, rng, dtype, bias=False)
        self.w_v = Linear(d_model, d_model, rng, dtype, bias=False)
        self.w_o = Linear(d_model, d_model, rng, dtype, bias=False)

    def _split_heads(self, x: Tensor) -> Tensor:
        batch, length, _ = x.shape
        return permute(reshape(x, (batch, length, self.num_heads, self.head_dim)), (0, 2, 1, 3))

    def __call__(self, q_in: Tensor, k_in: Tensor, v_in: Tensor, mask: Optional[np.ndarray] = None) -> Tensor:
        if q_in.ndim != 3 or k_in.ndim != 3 or v_in.ndim != 3:
            raise EShapeMismatch(
                f"multi_head_attention expects (batch, length, d_model) inputs, got {q_in.shape}, {k_in.shape}, {v_in.shape}")
        batch, length, d_model = q_in.shape
        heads = scaled_dot_attention(
            self._split_heads(self.w_q(q_in)),
            self._split_heads(self.w_k(k_in)),
            self._split_heads(self.w_v(v_in)),
            mask)
        merged = reshape(permute(heads, (0, 2, 1, 3)), (batch, length, d_model))
        return self.w_o(merged)


def multi_head_attention(mha: MultiHeadAttention, q_in: Tensor, k_in: Tensor, v_in: Tensor,
                         mask: Optional[np.ndarray] = None) -> Tensor:
    return mha(q_in, k_in, v_in, mask)
