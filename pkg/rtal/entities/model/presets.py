from typing import Dict, List

from rtal.entities.aggregation.schema import AggFormulaKind, AggPosition, AggregationSpec, AggStructure
from rtal.entities.model.schema import ModelConfig

RTAL_BOTH = AggregationSpec(structure=AggStructure.RTAL, formula=AggFormulaKind.EWP_FFN, position=AggPosition.BOTH)

_BASE = dict(num_layers=6, d_model=512, num_heads=8, d_ff=2048, vocab_size=37000, dropout=0.1)
_BIG = dict(_BASE, d_model=1024, num_heads=16, d_ff=4096, dropout=0.3)

_PRESETS: Dict[str, dict] = {
    'transformer-base': _BASE,
    'transformer-big': _BIG,
    'transformer-base-rtal-6l': dict(_BASE, aggregation=RTAL_BOTH),
    'transformer-big-rtal-6l': dict(_BIG, aggregation=RTAL_BOTH),
    'transformer-base-rtal-4l': dict(_BASE, num_layers=4, aggregation=RTAL_BOTH),
    'transformer-big-rtal-4l': dict(_BIG, num_layers=4, aggregation=RTAL_BOTH),
    'toy': dict(num_layers=1, d_model=4, num_heads=2, d_ff=8, vocab_size=10, max_len=16, dropout=0.0),
}


def preset_names() -> List[str]:
    return sorted(_PRESETS)


def get_preset(name: str) -> ModelConfig:
    if name not in _PRESETS:
        raise KeyError(f"unknown preset '{name}', expected one of {preset_names()}")
    return ModelConfig(**_PRESETS[name])
