from abc import ABCMeta, abstractmethod
from typing import Callable, Optional

import numpy as np

from rtal.entities.aggregation.schema import AggFormulaKind
from rtal.entities.exceptions import EShapeMismatch
from rtal.entities.nn.modules import LayerNorm, Module, PositionwiseFFN
from rtal.entities.tensor.functional import add, concat_last_dim, dropout, mul_elementwise, scale
from rtal.entities.tensor.tensor import Tensor, parameter

FormulaFactory = Callable[[], "AggFormula"]


def _check_pair(h_i: Tensor, h_j: Tensor) -> None:
    if h_i.shape != h_j.shape:
        raise EShapeMismatch(f"aggregation inputs differ in shape: {h_i.shape} and {h_j.shape}")


class AggFormula(Module, metaclass=ABCMeta):
    variant: AggFormulaKind

    @abstractmethod
    def __call__(self, h_i: Tensor, h_j: Tensor, rng: Optional[np.random.Generator] = None) -> Tensor:
        pass


class MeanFormula(AggFormula):
    variant = AggFormulaKind.MEAN

    def __call__(self, h_i, h_j, rng=None):
        return agg_mean(h_i, h_j)


class ConcatFFNFormula(AggFormula):
    variant = AggFormulaKind.CONCAT_FFN

    def __init__(self, d_model: int, inner_dim: int, rng: np.random.Generator, dtype=np.float32) -> None:
        self.ffn = PositionwiseFFN(2 * d_model, inner_dim, rng, dtype, out_dim=d_model)

    def __call__(self, h_i, h_j, rng=None):
        return agg_concat_ffn(self, h_i, h_j)


class EwpFFNFormula(AggFormula):
    variant = AggFormulaKind.EWP_FFN

    def __init__(self, d_model: int, inner_dim: int, dropout_rate: float, rng: np.random.Generator,
                 eps: float = 1e-6, dtype=np.float32) -> None:
        self.norm = LayerNorm(d_model, eps, dtype)
        self.ffn = PositionwiseFFN(d_model, inner_dim, rng, dtype)
        self.beta = parameter(np.asarray(1.0, dtype=dtype))
        self.dropout_rate = dropout_rate

    def __call__(self, h_i, h_j, rng=None):
        return agg_ewp_ffn(self, h_i, h_j, rng)


def agg_mean(h_i: Tensor, h_j: Tensor) -> Tensor:
    _check_pair(h_i, h_j)
    return scale(add(h_i, h_j), 0.5)


def agg_concat_ffn(formula: ConcatFFNFormula, h_i: Tensor, h_j: Tensor) -> Tensor:
    _check_pair(h_i, h_j)
    return formula.ffn(concat_last_dim(h_i, h_j))


def agg_ewp_ffn(formula: EwpFFNFormula, h_i: Tensor, h_j: Tensor,
                rng: Optional[np.random.Generator] = None) -> Tensor:
    _check_pair(h_i, h_j)
    sumb = mul_elementwise(add(h_i, h_j), formula.beta)
    branch = dropout(formula.ffn(formula.norm(sumb)), formula.dropout_rate, rng)
    return add(branch, sumb)


def formula_factory(kind: AggFormulaKind, d_model: int, inner_dim: int, dropout_rate: float,
                    rng: np.random.Generator, eps: float = 1e-6, dtype=np.float32) -> FormulaFactory:
    strategy = {
        AggFormulaKind.MEAN: lambda: MeanFormula(),
        AggFormulaKind.CONCAT_FFN: lambda: ConcatFFNFormula(d_model, inner_dim, rng, dtype),
        AggFormulaKind.EWP_FFN: lambda: EwpFFNFormula(d_model, inner_dim, dropout_rate, rng, eps, dtype),
    }

    return strategy[AggFormulaKind(kind)]
