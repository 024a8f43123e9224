"""
Residual tree aggregation of layers.

A balanced binary tree sits over 2^n layer outputs. Internal nodes are kept
in post-order, so both children are always evaluated before their parent.
Every internal node except the root adds the value of its right child, the
one covering the deeper layers, on top of its aggregation.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from rtal.entities.aggregation.formula import AggFormula, FormulaFactory
from rtal.entities.exceptions import EShapeMismatch, EStructuralError
from rtal.entities.nn.modules import Module
from rtal.entities.tensor.functional import add
from rtal.entities.tensor.tensor import Tensor


def is_power_of_two(count: int) -> bool:
    return count >= 1 and count & (count - 1) == 0


def check_tree_leaves(count: int) -> None:
    if count < 2 or not is_power_of_two(count):
        raise EStructuralError(f"tree aggregation requires the number of layers to be 2^n (n >= 1), got {count}")


@dataclass(frozen=True)
class ChildRef():
    is_leaf: bool
    index: int


class TreeNode(Module):
    def __init__(self, left: ChildRef, right: ChildRef, span: Tuple[int, int],
                 residual: bool, formula: AggFormula) -> None:
        self.formula = formula
        self.left = left
        self.right = right
        self.span = span
        self.residual = residual


class AggTree(Module):
    def __init__(self, leaf_count: int, make_formula: FormulaFactory, residual: bool = True) -> None:
        check_tree_leaves(leaf_count)
        self.leaf_count = leaf_count
        self.nodes: List[TreeNode] = []
        self._grow(0, leaf_count, make_formula, residual)

    def _grow(self, lo: int, hi: int, make_formula: FormulaFactory, residual: bool) -> ChildRef:
        if hi - lo == 1:
            return ChildRef(is_leaf=True, index=lo)
        mid = (lo + hi) // 2
        left = self._grow(lo, mid, make_formula, residual)
        right = self._grow(mid, hi, make_formula, residual)
        is_root = lo == 0 and hi == self.leaf_count
        self.nodes.append(TreeNode(left, right, (lo, hi), residual and not is_root, make_formula()))
        return ChildRef(is_leaf=False, index=len(self.nodes) - 1)

    @property
    def root(self) -> TreeNode:
        return self.nodes[-1]

    def __call__(self, layer_outputs: Sequence[Tensor], rng: Optional[np.random.Generator] = None) -> Tensor:
        return rtal_aggregate(self, layer_outputs, rng)


def rtal_aggregate(tree: AggTree, layer_outputs: Sequence[Tensor],
                   rng: Optional[np.random.Generator] = None) -> Tensor:
    check_tree_leaves(len(layer_outputs))
    if len(layer_outputs) != tree.leaf_count:
        raise EStructuralError(f"tree has {tree.leaf_count} leaves, got {len(layer_outputs)} layer outputs")
    shape = layer_outputs[0].shape
    if any(output.shape != shape for output in layer_outputs):
        raise EShapeMismatch(f"layer outputs differ in shape: {[output.shape for output in layer_outputs]}")

    values: List[Tensor] = []

    def value_of(ref: ChildRef) -> Tensor:
        return layer_outputs[ref.index] if ref.is_leaf else values[ref.index]

    for node in tree.nodes:
        right = value_of(node.right)
        out = node.formula(value_of(node.left), right, rng)
        values.append(add(out, right) if node.residual else out)
    return values[-1]
