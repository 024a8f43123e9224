import hashlib
from typing import Optional, Tuple

from pydantic import BaseModel, conint, confloat, validator

from rtal.entities.aggregation.aggregator import aggregation_span, describe_span
from rtal.entities.aggregation.schema import TREE_STRUCTURES, AggregationSpec

PAD_ID = 0
BOS_ID = 1
EOS_ID = 2
FIRST_TOKEN_ID = 3


class ModelConfig(BaseModel):
    num_layers: conint(ge=1) = 6
    d_model: conint(ge=2) = 512
    num_heads: conint(ge=1) = 8
    d_ff: conint(ge=1) = 2048
    vocab_size: conint(ge=FIRST_TOKEN_ID + 1) = 37000
    max_len: conint(ge=2) = 256
    dropout: confloat(ge=0.0, lt=1.0) = 0.1
    aggregation: AggregationSpec = AggregationSpec()
    agg_inner_dim: Optional[conint(ge=1)] = None
    layer_norm_eps: confloat(gt=0.0) = 1e-6
    seed: int = 0

    @validator('d_model')
    def d_model_is_even(cls, v):
        if v % 2 != 0:
            raise ValueError('d_model must be even for sinusoidal positions')
        return v

    @validator('num_heads')
    def heads_divide_d_model(cls, v, values):
        d_model = values.get('d_model')
        if d_model is not None and d_model % v != 0:
            raise ValueError(f'd_model={d_model} is not divisible by num_heads={v}')
        return v

    @validator('aggregation')
    def span_is_power_of_two(cls, v, values):
        num_layers = values.get('num_layers')
        if num_layers is None or v.structure not in TREE_STRUCTURES:
            return v
        count = 1 << (num_layers.bit_length() - 1)
        if count < 2:
            raise ValueError(f'{v.structure.value} requires the number of layers to be 2^n (n >= 1); '
                             f'num_layers={num_layers} leaves {count} layer(s) to aggregate')
        return v

    @property
    def inner_dim(self) -> int:
        return self.agg_inner_dim or self.d_model

    def aggregated_span(self) -> Tuple[int, int]:
        return aggregation_span(self.num_layers, self.aggregation.structure)

    def describe_span(self) -> str:
        return describe_span(self.num_layers, self.aggregation.structure)

    def digest(self) -> str:
        canonical = self.json(sort_keys=True)
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()
