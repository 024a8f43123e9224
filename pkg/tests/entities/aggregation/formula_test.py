import numpy as np
import pytest

from rtal.entities.aggregation.formula import (ConcatFFNFormula, EwpFFNFormula, MeanFormula, agg_ewp_ffn,
                                               formula_factory)
from rtal.entities.aggregation.schema import AggFormulaKind
from rtal.entities.exceptions import EShapeMismatch
from rtal.entities.tensor.functional import add
from rtal.entities.tensor.tensor import Tensor


def _x(*shape, seed=0):
    return Tensor(np.random.default_rng(seed).standard_normal(shape), dtype=np.float64)


def test_should_average_inputs():
    h_i, h_j = _x(2, 3, 4), _x(2, 3, 4, seed=1)

    assert np.allclose(MeanFormula()(h_i, h_j).data, (h_i.data + h_j.data) / 2.0)


@pytest.mark.parametrize("kind", list(AggFormulaKind))
def test_should_keep_input_shape(kind):
    formula = formula_factory(kind, 4, 6, 0.0, np.random.default_rng(0), dtype=np.float64)()

    assert formula(_x(2, 3, 4), _x(2, 3, 4, seed=1)).shape == (2, 3, 4)


@pytest.mark.parametrize("kind", list(AggFormulaKind))
def test_should_fail_when_inputs_differ_in_shape(kind):
    formula = formula_factory(kind, 4, 6, 0.0, np.random.default_rng(0), dtype=np.float64)()
    with pytest.raises(EShapeMismatch):
        formula(_x(2, 3, 4), _x(2, 2, 4))


def test_should_count_formula_parameters():
    d, a = 4, 6
    concat = ConcatFFNFormula(d, a, np.random.default_rng(0))
    ewp = EwpFFNFormula(d, a, 0.0, np.random.default_rng(0))

    assert MeanFormula().num_parameters() == 0
    assert concat.num_parameters() == 2 * d * a + a + a * d + d
    assert ewp.num_parameters() == 2 * d + (d * a + a) + (a * d + d) + 1


def test_should_start_ewp_gate_at_one():
    formula = EwpFFNFormula(4, 6, 0.0, np.random.default_rng(0), dtype=np.float64)

    assert formula.beta.shape == ()
    assert formula.beta.item() == 1.0


def test_should_add_gated_sum_on_top_of_the_ffn_branch():
    formula = EwpFFNFormula(4, 6, 0.0, np.random.default_rng(0), dtype=np.float64)
    formula.beta.data = np.asarray(0.5)
    h_i, h_j = _x(1, 2, 4), _x(1, 2, 4, seed=1)
    sumb = Tensor(0.5 * (h_i.data + h_j.data))
    expected = add(formula.ffn(formula.norm(sumb)), sumb).data

    assert np.allclose(agg_ewp_ffn(formula, h_i, h_j).data, expected)


def test_should_create_independent_formulas_from_a_factory():
    make = formula_factory(AggFormulaKind.CONCAT_FFN, 4, 6, 0.0, np.random.default_rng(0))
    first, second = make(), make()

    assert first is not second
    assert not np.array_equal(first.ffn.inner.weight.data, second.ffn.inner.weight.data)


def test_should_evaluate_concat_ffn_by_hand_in_one_dimension():
    formula = ConcatFFNFormula(1, 1, np.random.default_rng(0), dtype=np.float64)
    formula.ffn.inner.weight.data = np.array([[1.0], [1.0]])
    formula.ffn.outer.weight.data = np.array([[1.0]])
    h_i, h_j = Tensor([[2.0]], dtype=np.float64), Tensor([[3.0]], dtype=np.float64)

    assert formula(h_i, h_j).data.tolist() == [[5.0]]
