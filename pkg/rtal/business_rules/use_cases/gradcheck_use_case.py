import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from injector import inject
from pydantic import BaseModel

from rtal.business_rules.exceptions.training_exceptions import EGradientCheckFailed
from rtal.entities.aggregation.formula import MeanFormula, formula_factory
from rtal.entities.aggregation.schema import AggFormulaKind, AggregationSpec, AggStructure
from rtal.entities.aggregation.tree import AggTree
from rtal.entities.model.masks import source_mask, target_mask
from rtal.entities.model.schema import ModelConfig, PAD_ID
from rtal.entities.model.seq2seq import build
from rtal.entities.nn.attention import MultiHeadAttention
from rtal.entities.nn.layers import DecoderLayer, EncoderLayer
from rtal.entities.nn.losses import label_smoothed_ce
from rtal.entities.nn.modules import Module, PositionwiseFFN
from rtal.entities.tensor.functional import layer_norm, matmul, mul_elementwise, relu, softmax_last_dim, sum_all
from rtal.entities.tensor.gradcheck import grad_check, grad_check_parameters
from rtal.entities.tensor.tensor import Tensor, precision

logger = logging.getLogger(__name__)

COMPOSITE_FLOOR = 1e-4


class GradcheckResult(BaseModel):
    name: str
    error: float
    threshold: float
    passed: bool


def _rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def _tensor(rng: np.random.Generator, *shape: int) -> Tensor:
    return Tensor(rng.standard_normal(shape), dtype=np.float64)


def _projected(out: Tensor, seed: int = 1) -> Tensor:
    weights = np.random.default_rng(seed).standard_normal(out.shape)
    return sum_all(mul_elementwise(out, Tensor(weights, dtype=np.float64)))


def _module_error(module: Module, forward: Callable[[], Tensor], floor: float = COMPOSITE_FLOOR) -> float:
    errors = grad_check_parameters(lambda: _projected(forward()), module.parameters(), floor=floor)
    return max(errors.values(), default=0.0)


def _check_softmax() -> float:
    rng = _rng()
    mask = rng.random((3, 5)) > 0.3
    mask[:, 0] = True
    return grad_check(lambda x: softmax_last_dim(x, mask), _tensor(rng, 3, 5))


def _check_layer_norm() -> float:
    rng = _rng()
    gamma, shift = _tensor(rng, 6), _tensor(rng, 6)
    return grad_check(lambda x: layer_norm(x, gamma, shift), _tensor(rng, 2, 3, 6))


def _check_relu() -> float:
    rng = _rng()
    x = rng.standard_normal((4, 5))
    x[np.abs(x) < 0.1] = 0.5
    return grad_check(relu, Tensor(x, dtype=np.float64))


def _check_matmul() -> float:
    rng = _rng()
    w = _tensor(rng, 5, 3)
    return grad_check(lambda x: matmul(x, w), _tensor(rng, 2, 4, 5))


def _check_ffn() -> float:
    rng = _rng()
    ffn = PositionwiseFFN(6, 10, rng, np.float64)
    x = _tensor(rng, 2, 3, 6)
    return max(grad_check(ffn, x), _module_error(ffn, lambda: ffn(x)))


def _check_attention() -> float:
    rng = _rng()
    mha = MultiHeadAttention(8, 2, rng, np.float64)
    memory = _tensor(rng, 2, 4, 8)
    mask = source_mask(np.array([[3, 4, 5, PAD_ID], [3, 4, 5, 6]]))
    x = _tensor(rng, 2, 3, 8)
    return max(grad_check(lambda q: mha(q, memory, memory, mask), x, floor=COMPOSITE_FLOOR),
               _module_error(mha, lambda: mha(x, memory, memory, mask)))


def _check_formula(kind: AggFormulaKind) -> Callable[[], float]:
    def check() -> float:
        rng = _rng()
        formula = formula_factory(kind, 6, 8, 0.0, rng, dtype=np.float64)()
        h_j = _tensor(rng, 2, 3, 6)
        h_i = _tensor(rng, 2, 3, 6)
        error = grad_check(lambda x: formula(x, h_j), h_i, floor=COMPOSITE_FLOOR)
        if isinstance(formula, MeanFormula):
            return error
        return max(error, _module_error(formula, lambda: formula(h_i, h_j)))

    return check


def _check_tree() -> float:
    rng = _rng()
    tree = AggTree(4, formula_factory(AggFormulaKind.EWP_FFN, 6, 8, 0.0, rng, dtype=np.float64))
    leaves = [_tensor(rng, 2, 3, 6) for _ in range(4)]
    error = grad_check(lambda x: tree([x] + leaves[1:]), leaves[0], floor=COMPOSITE_FLOOR)
    return max(error, _module_error(tree, lambda: tree(leaves)))


def _check_encoder_layer() -> float:
    rng = _rng()
    layer = EncoderLayer(8, 2, 12, 0.0, rng, dtype=np.float64)
    x = _tensor(rng, 2, 4, 8)
    mask = source_mask(np.array([[3, 4, 5, PAD_ID], [3, 4, 5, 6]]))
    return max(grad_check(lambda v: layer(v, mask), x, floor=COMPOSITE_FLOOR),
               _module_error(layer, lambda: layer(x, mask)))


def _check_decoder_layer() -> float:
    rng = _rng()
    layer = DecoderLayer(8, 2, 12, 0.0, rng, dtype=np.float64)
    y = _tensor(rng, 2, 3, 8)
    memory = _tensor(rng, 2, 4, 8)
    src_mask = source_mask(np.array([[3, 4, 5, PAD_ID], [3, 4, 5, 6]]))
    tgt_mask = target_mask(np.array([[1, 3, 4], [1, 5, PAD_ID]]))
    return max(grad_check(lambda v: layer(v, memory, src_mask, tgt_mask), y, floor=COMPOSITE_FLOOR),
               _module_error(layer, lambda: layer(y, memory, src_mask, tgt_mask)))


def _check_seq2seq_loss() -> float:
    config = ModelConfig(num_layers=2, d_model=8, num_heads=2, d_ff=12, vocab_size=7, max_len=8, dropout=0.0,
                         aggregation=AggregationSpec(structure=AggStructure.RTAL))
    model = build(config, np.float64)
    source = np.array([[3, 4, 5, 6], [5, 4, 3, PAD_ID]])
    target_in = np.array([[1, 3, 4, 5], [1, 6, 5, PAD_ID]])
    target_out = np.array([[3, 4, 5, 2], [6, 5, 2, PAD_ID]])
    errors = grad_check_parameters(lambda: label_smoothed_ce(model(source, target_in), target_out, 0.1, PAD_ID),
                                   model.parameters(), floor=COMPOSITE_FLOOR)
    return max(errors.values())


SUITE: Dict[str, Callable[[], float]] = {
    'softmax': _check_softmax,
    'layer_norm': _check_layer_norm,
    'relu': _check_relu,
    'matmul': _check_matmul,
    'ffn': _check_ffn,
    'multi_head_attention': _check_attention,
    'agg_mean': _check_formula(AggFormulaKind.MEAN),
    'agg_concat_ffn': _check_formula(AggFormulaKind.CONCAT_FFN),
    'agg_ewp_ffn': _check_formula(AggFormulaKind.EWP_FFN),
    'rtal_tree_4': _check_tree,
    'encoder_layer': _check_encoder_layer,
    'decoder_layer': _check_decoder_layer,
    'seq2seq_loss': _check_seq2seq_loss,
}


@inject
@dataclass
class GradcheckUseCase():
    def run(self, names: Optional[Sequence[str]] = None, threshold: float = 1e-5) -> List[GradcheckResult]:
        selected = list(names) if names else list(SUITE)
        unknown = [name for name in selected if name not in SUITE]
        if unknown:
            raise KeyError(f"unknown gradient checks {unknown}, expected some of {list(SUITE)}")

        results = []
        with precision(np.float64):
            for name in selected:
                error = SUITE[name]()
                result = GradcheckResult(name=name, error=error, threshold=threshold, passed=error <= threshold)
                logger.info(f"gradcheck {name}: {error:.3e} {'ok' if result.passed else 'FAILED'}")
                results.append(result)
        return results

    def verify(self, results: Sequence[GradcheckResult]) -> None:
        failed = [result.name for result in results if not result.passed]
        if failed:
            raise EGradientCheckFailed(f"gradient checks above threshold: {failed}")
