"""
Encoder-decoder Transformer with optional layer aggregation.

Both stacks are pre-norm and close with a final layer norm. When a stack has an
aggregator, the aggregator output over the aggregated span replaces the top
layer output before that final norm: the encoder's result feeds every decoder
cross-attention and the decoder's result feeds the tied output projection.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from rtal.entities.aggregation.aggregator import build_aggregator
from rtal.entities.exceptions import EEmptyPrefix, ESequenceTooLong, EShapeMismatch
from rtal.entities.model.masks import source_mask, target_mask
from rtal.entities.model.schema import BOS_ID, ModelConfig
from rtal.entities.nn.layers import DecoderLayer, EncoderLayer
from rtal.entities.nn.modules import Embedding, LayerNorm, Module, sinusoidal_positions
from rtal.entities.tensor.functional import (add, dropout, log_softmax_last_dim, matmul, narrow, reshape, scale,
                                             transpose_last_two)
from rtal.entities.tensor.tensor import Tensor
from rtal.entities.training.batching import Batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EncodedSource():
    memory: Tensor
    src_mask: np.ndarray

    def repeat(self, count: int) -> "EncodedSource":
        """Detached copy whose single source row is repeated `count` times."""
        rows = self.memory.shape[0]
        if rows == count:
            return self
        if rows != 1:
            raise EShapeMismatch(f"cannot repeat {rows} encoded sources over {count} prefixes")
        return EncodedSource(
            memory=Tensor(np.repeat(self.memory.data, count, axis=0)),
            src_mask=np.repeat(self.src_mask, count, axis=0))


class Seq2SeqModel(Module):
    def __init__(self, config: ModelConfig, dtype=np.float32) -> None:
        layer_seed, aggregator_seed = np.random.SeedSequence(config.seed).spawn(2)
        rng = np.random.default_rng(layer_seed)
        agg_rng = np.random.default_rng(aggregator_seed)
        d = config.d_model
        eps = config.layer_norm_eps

        self.config = config
        self.embedding = Embedding(config.vocab_size, d, rng, dtype)
        self.encoder_layers = [EncoderLayer(d, config.num_heads, config.d_ff, config.dropout, rng, eps, dtype)
                               for _ in range(config.num_layers)]
        self.decoder_layers = [DecoderLayer(d, config.num_heads, config.d_ff, config.dropout, rng, eps, dtype)
                               for _ in range(config.num_layers)]
        self.encoder_norm = LayerNorm(d, eps, dtype)
        self.decoder_norm = LayerNorm(d, eps, dtype)

        spec = config.aggregation
        self.encoder_aggregator = self._aggregator(spec.on_encoder, agg_rng, dtype)
        self.decoder_aggregator = self._aggregator(spec.on_decoder, agg_rng, dtype)
        self.positions = sinusoidal_positions(config.max_len, d, dtype)

    def _aggregator(self, active: bool, rng: np.random.Generator, dtype) -> Optional[Module]:
        if not active:
            return None
        config = self.config
        return build_aggregator(config.aggregation, config.num_layers, config.d_model, config.inner_dim,
                                config.dropout, rng, config.layer_norm_eps, dtype)

    def _collapse(self, layer_outputs: List[Tensor], aggregator: Optional[Module],
                  rng: Optional[np.random.Generator]) -> Tensor:
        if aggregator is None:
            return layer_outputs[-1]
        start, _ = self.config.aggregated_span()
        return aggregator(layer_outputs[start:], rng)

    def embed(self, ids: np.ndarray, rng: Optional[np.random.Generator] = None) -> Tensor:
        ids = np.asarray(ids)
        length = ids.shape[-1]
        if length > self.config.max_len:
            raise ESequenceTooLong(f"sequence length {length} exceeds max_len={self.config.max_len}")
        tokens = scale(self.embedding(ids), math.sqrt(self.config.d_model))
        return dropout(add(tokens, Tensor(self.positions[:length])), self.config.dropout, rng)

    def encode(self, source: np.ndarray, rng: Optional[np.random.Generator] = None) -> EncodedSource:
        mask = source_mask(source)
        x = self.embed(source, rng)
        outputs = []
        for layer in self.encoder_layers:
            x = layer(x, mask, rng)
            outputs.append(x)
        memory = self.encoder_norm(self._collapse(outputs, self.encoder_aggregator, rng))
        return EncodedSource(memory=memory, src_mask=mask)

    def decoder_states(self, encoded: EncodedSource, target_in: np.ndarray,
                       rng: Optional[np.random.Generator] = None) -> List[Tensor]:
        tgt_mask = target_mask(target_in)
        y = self.embed(target_in, rng)
        outputs = []
        for layer in self.decoder_layers:
            y = layer(y, encoded.memory, encoded.src_mask, tgt_mask, rng)
            outputs.append(y)
        return outputs

    def project(self, layer_outputs: List[Tensor], rng: Optional[np.random.Generator] = None) -> Tensor:
        hidden = self.decoder_norm(self._collapse(layer_outputs, self.decoder_aggregator, rng))
        return matmul(hidden, transpose_last_two(self.embedding.table))

    def __call__(self, source: np.ndarray, target_in: np.ndarray,
                 rng: Optional[np.random.Generator] = None) -> Tensor:
        encoded = self.encode(source, rng)
        return self.project(self.decoder_states(encoded, target_in, rng), rng)


def build(config: ModelConfig, dtype=np.float32) -> Seq2SeqModel:
    model = Seq2SeqModel(config, dtype)
    for side, active in (("encoder", config.aggregation.on_encoder), ("decoder", config.aggregation.on_decoder)):
        if active:
            logger.info(f"{side} {config.aggregation.structure.value} aggregated span: {config.describe_span()}")
    return model


def forward_train(model: Seq2SeqModel, batch: Batch, rng: Optional[np.random.Generator] = None) -> Tensor:
    """Logits of shape (batch, target length, vocab) over the shifted gold target."""
    return model(batch.source, batch.target_in, rng)


def forward_step(model: Seq2SeqModel, encoded: EncodedSource, prefix_tokens: np.ndarray) -> Tensor:
    """
    Next-token log-probabilities of shape (rows, vocab) for prefixes that start with BOS.

    The decoder runs over the whole prefix; every layer state is narrowed to
    the last position before the decoder aggregation is applied.
    """
    prefix_tokens = np.atleast_2d(np.asarray(prefix_tokens))
    if prefix_tokens.shape[-1] == 0:
        raise EEmptyPrefix("prefix must contain at least the start symbol")
    if not (prefix_tokens[:, 0] == BOS_ID).all():
        raise EEmptyPrefix(f"prefix must start with the start symbol {BOS_ID}")

    rows, length = prefix_tokens.shape
    encoded = encoded.repeat(rows)
    states = model.decoder_states(encoded, prefix_tokens)
    last = [narrow(state, 1, length - 1, 1) for state in states]
    logits = model.project(last)
    return log_softmax_last_dim(reshape(logits, (rows, logits.shape[-1])))
