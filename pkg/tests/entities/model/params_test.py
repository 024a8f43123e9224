import numpy as np
import pytest

from rtal.entities.aggregation.schema import AggFormulaKind, AggPosition, AggregationSpec, AggStructure
from rtal.entities.model.params import count_params, formula_params
from rtal.entities.model.presets import get_preset
from rtal.entities.model.schema import ModelConfig
from rtal.entities.model.seq2seq import build


def _with(config, **aggregation):
    return ModelConfig(**{**config.dict(), 'aggregation': AggregationSpec(**aggregation)})


def test_should_count_transformer_base_near_65m():
    total = count_params(get_preset('transformer-base')).total

    assert total == 63_047_680
    assert abs(total - 65_000_000) / 65_000_000 <= 0.05


def test_should_count_transformer_big_near_213m():
    total = count_params(get_preset('transformer-big')).total

    assert total == 214_175_744
    assert abs(total - 213_000_000) / 213_000_000 <= 0.10


def test_should_add_three_ewp_nodes_per_stack_for_six_layer_rtal():
    base = count_params(get_preset('transformer-base')).total
    rtal = count_params(get_preset('transformer-base-rtal-6l')).total
    d = 512
    per_node = 2 * d + (d * d + d) + (d * d + d) + 1

    assert rtal - base == 2 * 3 * per_node


def test_should_leave_the_four_layer_rtal_model_smaller_than_the_base_model():
    assert count_params(get_preset('transformer-base-rtal-4l')).total < count_params(get_preset('transformer-base')).total


@pytest.mark.parametrize("preset", ['toy', 'transformer-base'])
def test_should_not_count_parameters_for_mean_aggregation(preset):
    config = get_preset(preset)
    if config.num_layers == 1:
        config = ModelConfig(**{**config.dict(), 'num_layers': 2})
    mean = _with(config, structure=AggStructure.RTAL, formula=AggFormulaKind.MEAN)

    assert count_params(mean).total == count_params(config).total


@pytest.mark.parametrize("structure", [AggStructure.NONE, AggStructure.RTAL, AggStructure.CNN_LIKE_TREE,
                                       AggStructure.LINEAR_COMBINATION, AggStructure.ITERATIVE_COMBINATION])
@pytest.mark.parametrize("formula", list(AggFormulaKind))
@pytest.mark.parametrize("position", list(AggPosition))
def test_should_match_enumerated_parameters(structure, formula, position):
    config = ModelConfig(num_layers=3, d_model=4, num_heads=2, d_ff=8, vocab_size=10, max_len=16, dropout=0.0,
                         agg_inner_dim=6, aggregation=AggregationSpec(structure=structure, formula=formula,
                                                                      position=position))

    assert count_params(config).total == build(config).num_parameters()


def test_should_match_enumeration_for_toy_preset():
    config = get_preset('toy')
    report = count_params(config)

    assert report.total == build(config).num_parameters()
    assert report.embeddings == 10 * 4
    assert sum(value for _, value in report.rows()) == report.total


@pytest.mark.parametrize("position, encoder, decoder", [
    (AggPosition.ENCODER, True, False),
    (AggPosition.DECODER, False, True),
    (AggPosition.BOTH, True, True),
])
def test_should_place_aggregation_parameters_by_position(position, encoder, decoder):
    config = _with(get_preset('transformer-base'), structure=AggStructure.RTAL, position=position)
    report = count_params(config)

    assert (report.encoder_aggregation > 0) is encoder
    assert (report.decoder_aggregation > 0) is decoder


def test_should_count_formula_parameters_in_closed_form():
    d, a = 8, 5

    assert formula_params(AggFormulaKind.MEAN, d, a) == 0
    assert formula_params(AggFormulaKind.CONCAT_FFN, d, a) == (2 * d * a + a) + (a * d + d)
    assert formula_params(AggFormulaKind.EWP_FFN, d, a) == (d * a + a) + (a * d + d) + 2 * d + 1


def test_should_count_linear_combination_as_one_scalar_per_layer():
    config = _with(get_preset('transformer-base'), structure=AggStructure.LINEAR_COMBINATION)

    assert count_params(config).encoder_aggregation == 6
    assert np.isclose(count_params(config).total - count_params(get_preset('transformer-base')).total, 12)
