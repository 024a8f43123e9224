from pydantic import BaseModel

from rtal.entities.aggregation.schema import AggFormulaKind, AggStructure
from rtal.entities.model.schema import ModelConfig


class ParamReport(BaseModel):
    embeddings: int
    encoder_layers: int
    decoder_layers: int
    final_norms: int
    encoder_aggregation: int
    decoder_aggregation: int
    total: int

    def rows(self):
        return [(name, value) for name, value in self.dict().items() if name != 'total']


def _ffn(width: int, hidden: int, out: int) -> int:
    return width * hidden + hidden + hidden * out + out


def _layer_norm(width: int) -> int:
    return 2 * width


def formula_params(kind: AggFormulaKind, d_model: int, inner_dim: int) -> int:
    strategy = {
        AggFormulaKind.MEAN: lambda: 0,
        AggFormulaKind.CONCAT_FFN: lambda: _ffn(2 * d_model, inner_dim, d_model),
        AggFormulaKind.EWP_FFN: lambda: _layer_norm(d_model) + _ffn(d_model, inner_dim, d_model) + 1,
    }

    return strategy[AggFormulaKind(kind)]()


def aggregator_params(config: ModelConfig) -> int:
    """Trainable scalars of one stack's aggregator."""
    spec = config.aggregation
    _, count = config.aggregated_span()
    per_node = formula_params(spec.formula, config.d_model, config.inner_dim)

    strategy = {
        AggStructure.NONE: lambda: 0,
        AggStructure.RTAL: lambda: (count - 1) * per_node,
        AggStructure.CNN_LIKE_TREE: lambda: (count - 1) * per_node,
        AggStructure.ITERATIVE_COMBINATION: lambda: (count - 1) * per_node,
        AggStructure.LINEAR_COMBINATION: lambda: count,
    }

    return strategy[spec.structure]()


def count_params(config: ModelConfig) -> ParamReport:
    d = config.d_model
    attention = 4 * d * d
    ffn = _ffn(d, config.d_ff, d)
    encoder_layer = attention + ffn + 2 * _layer_norm(d)
    decoder_layer = 2 * attention + ffn + 3 * _layer_norm(d)
    aggregation = aggregator_params(config)

    report = dict(
        embeddings=config.vocab_size * d,
        encoder_layers=config.num_layers * encoder_layer,
        decoder_layers=config.num_layers * decoder_layer,
        final_norms=2 * _layer_norm(d),
        encoder_aggregation=aggregation if config.aggregation.on_encoder else 0,
        decoder_aggregation=aggregation if config.aggregation.on_decoder else 0,
    )
    return ParamReport(total=sum(report.values()), **report)
