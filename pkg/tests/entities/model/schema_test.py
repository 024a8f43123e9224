import pytest
from pydantic import ValidationError

from rtal.entities.aggregation.schema import AggFormulaKind, AggPosition, AggregationSpec, AggStructure
from rtal.entities.model.presets import RTAL_BOTH, get_preset, preset_names
from rtal.entities.model.schema import ModelConfig


def test_should_fail_when_heads_do_not_divide_d_model():
    with pytest.raises(ValidationError) as execinfo:
        ModelConfig(d_model=10, num_heads=3)

    assert "not divisible by num_heads" in str(execinfo.value)


def test_should_fail_when_d_model_is_odd():
    with pytest.raises(ValidationError) as execinfo:
        ModelConfig(d_model=9, num_heads=3)

    assert "must be even" in str(execinfo.value)


def test_should_fail_when_a_tree_has_a_single_layer():
    with pytest.raises(ValidationError) as execinfo:
        ModelConfig(num_layers=1, aggregation=AggregationSpec(structure=AggStructure.RTAL))

    assert "requires the number of layers to be 2^n (n >= 1)" in str(execinfo.value)


def test_should_fail_when_vocabulary_has_no_room_for_content_tokens():
    with pytest.raises(ValidationError) as execinfo:
        ModelConfig(vocab_size=1)

    assert "vocab_size" in str(execinfo.value)


def test_should_accept_a_single_layer_linear_combination():
    config = ModelConfig(num_layers=1, aggregation=AggregationSpec(structure=AggStructure.LINEAR_COMBINATION))

    assert config.aggregated_span() == (0, 1)


def test_should_default_inner_dim_to_d_model():
    assert ModelConfig(d_model=64, num_heads=4).inner_dim == 64
    assert ModelConfig(d_model=64, num_heads=4, agg_inner_dim=16).inner_dim == 16


def test_should_change_digest_with_any_field():
    base = ModelConfig()

    assert base.digest() == ModelConfig().digest()
    assert base.digest() != ModelConfig(seed=1).digest()
    assert base.digest() != ModelConfig(aggregation=RTAL_BOTH).digest()


def test_should_label_aggregation():
    spec = AggregationSpec(structure=AggStructure.RTAL, formula=AggFormulaKind.MEAN, position=AggPosition.DECODER)

    assert spec.label() == "rtal/mean/decoder"
    assert AggregationSpec().label() == "none"
    assert spec.on_decoder and not spec.on_encoder


def test_should_build_every_preset():
    for name in preset_names():
        assert isinstance(get_preset(name), ModelConfig)


def test_should_fail_on_unknown_preset():
    with pytest.raises(KeyError) as execinfo:
        get_preset("transformer-huge")

    assert "transformer-huge" in str(execinfo.value)
