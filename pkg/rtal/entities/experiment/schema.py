import json
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, confloat, conint, root_validator, validator

from rtal.entities.aggregation.schema import AggFormulaKind, AggPosition, AggregationSpec, AggStructure
from rtal.entities.model.schema import ModelConfig
from rtal.entities.task.schema import SyntheticTask


class TrainingSpec(BaseModel):
    steps: conint(ge=0) = 3000
    warmup: conint(ge=1) = 400
    lr_scale: confloat(gt=0.0) = 1.0
    tokens_per_batch: conint(ge=1) = 1024
    label_smoothing: confloat(ge=0.0, lt=1.0) = 0.1
    beta1: confloat(ge=0.0, lt=1.0) = 0.9
    beta2: confloat(ge=0.0, lt=1.0) = 0.98
    adam_eps: confloat(gt=0.0) = 1e-9
    checkpoint_every: conint(ge=1) = 500
    log_every: conint(ge=1) = 100
    eval_every: Optional[conint(ge=1)] = None
    eval_size: conint(ge=1) = 100


class ExperimentConfig(BaseModel):
    """Everything a run needs; a run directory stores the exact instance that produced it."""
    name: str = "experiment"
    seed: int = 0
    model: ModelConfig = ModelConfig()
    task: SyntheticTask = SyntheticTask()
    training: TrainingSpec = TrainingSpec()
    output_dir: Optional[str] = None

    @root_validator(skip_on_failure=True)
    def model_seed_follows_experiment_seed(cls, values):
        values['model'] = values['model'].copy(update={'seed': values['seed']})
        return values

    @validator('task')
    def task_fits_model(cls, v, values):
        model = values.get('model')
        if model is not None:
            if v.vocab_size > model.vocab_size:
                raise ValueError(f"task vocab_size={v.vocab_size} exceeds model vocab_size={model.vocab_size}")
            if v.max_len + 1 > model.max_len:
                raise ValueError(f"task max_len={v.max_len} plus EOS exceeds model max_len={model.max_len}")
        return v


class AblationAxis(str, Enum):
    POSITION = "position"
    FORMULA = "formula"
    STRUCTURE = "structure"


class AblationCell(BaseModel):
    cell: str
    aggregation: AggregationSpec


def _tree_default(base: AggregationSpec) -> AggregationSpec:
    if base.enabled:
        return base
    return base.copy(update={'structure': AggStructure.RTAL})


def _axis_cells(axis: AblationAxis, base: AggregationSpec) -> List[AggregationSpec]:
    tree = _tree_default(base)
    strategy = {
        AblationAxis.POSITION: lambda: [tree.copy(update={'position': p}) for p in AggPosition],
        AblationAxis.FORMULA: lambda: [tree.copy(update={'formula': f}) for f in AggFormulaKind],
        AblationAxis.STRUCTURE: lambda: [tree.copy(update={'structure': s}) for s in AggStructure],
    }

    return strategy[AblationAxis(axis)]()


def ablation_cells(base: AggregationSpec, axis: Optional[AblationAxis] = None,
                   grid: Optional[Sequence[Dict[str, Any]]] = None) -> List[AblationCell]:
    """Cells from an axis sweep around `base`, or from explicit partial overrides of it."""
    if axis is not None:
        specs = _axis_cells(axis, base)
    else:
        specs = [AggregationSpec(**{**base.dict(), **overrides}) for overrides in (grid or [])]
    return [AblationCell(cell=f"{index:02d}-{spec.label().replace('/', '-')}", aggregation=spec)
            for index, spec in enumerate(specs)]


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(raw: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Applies `dotted.key=value` assignments; values parse as JSON when they can."""
    result = json.loads(json.dumps(raw))
    for override in overrides:
        key, separator, value = override.partition('=')
        if not separator or not key:
            raise ValueError(f"override '{override}' is not of the form key=value")
        node = result
        *parents, leaf = key.split('.')
        for parent in parents:
            node = node.setdefault(parent, {})
            if not isinstance(node, dict):
                raise ValueError(f"override '{override}': '{parent}' is not a section")
        node[leaf] = _parse_value(value)
    return result
