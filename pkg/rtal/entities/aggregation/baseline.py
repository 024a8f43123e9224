from typing import List, Optional, Sequence

import numpy as np

from rtal.entities.aggregation.formula import FormulaFactory
from rtal.entities.aggregation.tree import AggTree, rtal_aggregate
from rtal.entities.exceptions import EShapeMismatch, EStructuralError
from rtal.entities.nn.modules import Module
from rtal.entities.tensor.functional import add, mul_elementwise, softmax_last_dim, take
from rtal.entities.tensor.tensor import Tensor, parameter


class LinearCombination(Module):
    """sum_l softmax(w)_l * h_l with one trainable scalar per layer."""

    def __init__(self, layer_count: int, dtype=np.float32) -> None:
        self.layer_count = layer_count
        self.weights = parameter(np.zeros(layer_count, dtype=dtype))

    def __call__(self, layer_outputs, rng=None):
        return baseline_aggregate(self, layer_outputs, rng)


class IterativeCombination(Module):
    """Left fold y_l = AGG(h_l, y_{l-1}) starting from y_1 = h_1."""

    def __init__(self, layer_count: int, make_formula: FormulaFactory) -> None:
        self.layer_count = layer_count
        self.formulas = [make_formula() for _ in range(layer_count - 1)]

    def __call__(self, layer_outputs, rng=None):
        return baseline_aggregate(self, layer_outputs, rng)


class CnnLikeTree(AggTree):
    """The residual tree with every residual connection removed."""

    def __init__(self, leaf_count: int, make_formula: FormulaFactory) -> None:
        super(CnnLikeTree, self).__init__(leaf_count, make_formula, residual=False)

    def __call__(self, layer_outputs, rng=None):
        return baseline_aggregate(self, layer_outputs, rng)


def _linear_combination(agg: LinearCombination, layer_outputs: Sequence[Tensor]) -> Tensor:
    weights = softmax_last_dim(agg.weights)
    total = mul_elementwise(layer_outputs[0], take(weights, 0))
    for index in range(1, len(layer_outputs)):
        total = add(total, mul_elementwise(layer_outputs[index], take(weights, index)))
    return total


def _iterative_combination(agg: IterativeCombination, layer_outputs: Sequence[Tensor],
                           rng: Optional[np.random.Generator]) -> Tensor:
    folded = layer_outputs[0]
    for formula, h in zip(agg.formulas, layer_outputs[1:]):
        folded = formula(h, folded, rng)
    return folded


def baseline_aggregate(agg: Module, layer_outputs: Sequence[Tensor],
                       rng: Optional[np.random.Generator] = None) -> Tensor:
    outputs: List[Tensor] = list(layer_outputs)
    if not outputs:
        raise EStructuralError("baseline aggregation needs at least one layer output")
    if any(output.shape != outputs[0].shape for output in outputs):
        raise EShapeMismatch(f"layer outputs differ in shape: {[output.shape for output in outputs]}")

    if isinstance(agg, CnnLikeTree):
        return rtal_aggregate(agg, outputs, rng)

    if len(outputs) != agg.layer_count:
        raise EStructuralError(f"aggregator expects {agg.layer_count} layer outputs, got {len(outputs)}")
    if isinstance(agg, LinearCombination):
        return _linear_combination(agg, outputs)
    if isinstance(agg, IterativeCombination):
        return _iterative_combination(agg, outputs, rng)
    raise EStructuralError(f"{type(agg).__name__} is not a baseline aggregator")
