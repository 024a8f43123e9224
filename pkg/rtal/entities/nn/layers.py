from typing import Optional

import numpy as np

from rtal.entities.nn.attention import MultiHeadAttention, multi_head_attention
from rtal.entities.nn.modules import LayerNorm, Module, PositionwiseFFN, position_ffn
from rtal.entities.tensor.functional import add, dropout
from rtal.entities.tensor.tensor import Tensor


class EncoderLayer(Module):
    """Pre-norm block: x + dropout(sublayer(LN(x))) for self-attention, then FFN."""

    def __init__(self, d_model: int, num_heads: int, d_ff: int, dropout_rate: float,
                 rng: np.random.Generator, eps: float = 1e-6, dtype=np.float32) -> None:
        self.self_attn = MultiHeadAttention(d_model, num_heads, rng, dtype)
        self.ffn = PositionwiseFFN(d_model, d_ff, rng, dtype)
        self.self_attn_norm = LayerNorm(d_model, eps, dtype)
        self.ffn_norm = LayerNorm(d_model, eps, dtype)
        self.dropout_rate = dropout_rate

    def __call__(self, x: Tensor, src_mask: Optional[np.ndarray],
                 rng: Optional[np.random.Generator] = None) -> Tensor:
        h = self.self_attn_norm(x)
        x = add(x, dropout(multi_head_attention(self.self_attn, h, h, h, src_mask), self.dropout_rate, rng))
        h = self.ffn_norm(x)
        return add(x, dropout(position_ffn(self.ffn, h), self.dropout_rate, rng))


class DecoderLayer(Module):
    def __init__(self, d_model: int, num_heads: int, d_ff: int, dropout_rate: float,
                 rng: np.random.Generator, eps: float = 1e-6, dtype=np.float32) -> None:
        self.self_attn = MultiHeadAttention(d_model, num_heads, rng, dtype)
        self.cross_attn = MultiHeadAttention(d_model, num_heads, rng, dtype)
        self.ffn = PositionwiseFFN(d_model, d_ff, rng, dtype)
        self.self_attn_norm = LayerNorm(d_model, eps, dtype)
        self.cross_attn_norm = LayerNorm(d_model, eps, dtype)
        self.ffn_norm = LayerNorm(d_model, eps, dtype)
        self.dropout_rate = dropout_rate

    def __call__(self, y: Tensor, memory: Tensor, src_mask: Optional[np.ndarray],
                 tgt_mask: Optional[np.ndarray], rng: Optional[np.random.Generator] = None) -> Tensor:
        h = self.self_attn_norm(y)
        y = add(y, dropout(multi_head_attention(self.self_attn, h, h, h, tgt_mask), self.dropout_rate, rng))
        h = self.cross_attn_norm(y)
        y = add(y, dropout(multi_head_attention(self.cross_attn, h, memory, memory, src_mask), self.dropout_rate, rng))
        h = self.ffn_norm(y)
        return add(y, dropout(position_ffn(self.ffn, h), self.dropout_rate, rng))
