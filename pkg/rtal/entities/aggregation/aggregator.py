from typing import Optional, Tuple

import numpy as np

from rtal.entities.aggregation.baseline import CnnLikeTree, IterativeCombination, LinearCombination
from rtal.entities.aggregation.formula import formula_factory
from rtal.entities.aggregation.schema import TREE_STRUCTURES, AggregationSpec, AggStructure
from rtal.entities.aggregation.tree import AggTree, check_tree_leaves
from rtal.entities.nn.modules import Module


def aggregation_span(num_layers: int, structure: AggStructure) -> Tuple[int, int]:
    """(first aggregated layer, 0-based; number of aggregated layers).

    Trees take the last 2^floor(log2(num_layers)) layers, the other structures
    take every layer.
    """
    if structure == AggStructure.NONE:
        return num_layers - 1, 1
    if structure in TREE_STRUCTURES:
        count = 1 << (num_layers.bit_length() - 1)
        check_tree_leaves(count)
        return num_layers - count, count
    return 0, num_layers


def describe_span(num_layers: int, structure: AggStructure) -> str:
    start, count = aggregation_span(num_layers, structure)
    return f"layers {start + 1}..{start + count}"


def build_aggregator(spec: AggregationSpec, num_layers: int, d_model: int, inner_dim: int,
                     dropout_rate: float, rng: np.random.Generator, eps: float = 1e-6,
                     dtype=np.float32) -> Optional[Module]:
    if not spec.enabled:
        return None
    _, count = aggregation_span(num_layers, spec.structure)
    make_formula = formula_factory(spec.formula, d_model, inner_dim, dropout_rate, rng, eps, dtype)

    strategy = {
        AggStructure.RTAL: lambda: AggTree(count, make_formula),
        AggStructure.CNN_LIKE_TREE: lambda: CnnLikeTree(count, make_formula),
        AggStructure.LINEAR_COMBINATION: lambda: LinearCombination(count, dtype),
        AggStructure.ITERATIVE_COMBINATION: lambda: IterativeCombination(count, make_formula),
    }

    return strategy[spec.structure]()
