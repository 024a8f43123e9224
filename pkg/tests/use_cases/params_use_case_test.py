import json

from rtal.business_rules.use_cases.params_use_case import ParamsUseCase, format_params
from rtal.entities.model.params import count_params
from rtal.entities.model.presets import get_preset


def test_should_write_the_report_when_given_a_directory(injector, tmp_path):
    report = injector.get(ParamsUseCase).report(get_preset('transformer-base'), tmp_path)

    assert report.total == 63_047_680
    assert json.loads((tmp_path / "params.json").read_text(encoding="utf-8"))['total'] == 63_047_680


def test_should_not_write_without_a_directory(injector, tmp_path):
    injector.get(ParamsUseCase).report(get_preset('toy'))

    assert not (tmp_path / "params.json").exists()


def test_should_format_an_itemized_table():
    config = get_preset('transformer-base-rtal-6l')
    lines = format_params(config, count_params(config)).splitlines()

    assert lines[0] == "aggregation: rtal/ewp_ffn/both"
    assert lines[-1].split() == ["total", f"{count_params(config).total:,d}"]
    assert any(line.startswith("decoder_aggregation") for line in lines)
