import numpy as np
import pytest

from rtal.entities.exceptions import EInvalidModelConfig, EShapeMismatch
from rtal.entities.model.masks import causal_mask
from rtal.entities.nn.attention import MultiHeadAttention, scaled_dot_attention
from rtal.entities.tensor.functional import concat_last_dim, matmul, narrow
from rtal.entities.tensor.tensor import Tensor


def _x(*shape, seed=0):
    return Tensor(np.random.default_rng(seed).standard_normal(shape), dtype=np.float64)


def test_should_fail_when_heads_do_not_divide_width():
    with pytest.raises(EInvalidModelConfig) as execinfo:
        MultiHeadAttention(10, 3, np.random.default_rng(0))

    assert "not divisible" in str(execinfo.value)


def test_should_keep_query_shape():
    mha = MultiHeadAttention(8, 2, np.random.default_rng(0), np.float64)

    assert mha(_x(2, 3, 8), _x(2, 5, 8), _x(2, 5, 8)).shape == (2, 3, 8)


def test_should_fail_on_unbatched_input():
    mha = MultiHeadAttention(8, 2, np.random.default_rng(0))
    with pytest.raises(EShapeMismatch):
        mha(_x(3, 8), _x(3, 8), _x(3, 8))


def test_should_return_the_single_visible_value():
    q, k, v = _x(1, 3, 4), _x(1, 3, 4, seed=1), _x(1, 3, 4, seed=2)
    mask = np.array([[False, True, False]])
    out = scaled_dot_attention(q, k, v, mask)

    assert np.allclose(out.data, np.broadcast_to(v.data[:, 1:2], (1, 3, 4)))


def test_should_not_look_at_future_positions_under_a_causal_mask():
    mha = MultiHeadAttention(8, 2, np.random.default_rng(0), np.float64)
    x = _x(1, 5, 8)
    changed = x.data.copy()
    changed[:, 3:] += 10.0
    mask = causal_mask(5)
    before = mha(x, x, x, mask).data
    after = mha(Tensor(changed), Tensor(changed), Tensor(changed), mask).data

    assert np.allclose(before[:, :3], after[:, :3])
    assert not np.allclose(before[:, 3:], after[:, 3:])


def test_should_reduce_to_scaled_dot_attention_with_one_head_and_identity_projections():
    mha = MultiHeadAttention(4, 1, np.random.default_rng(0), np.float64)
    for projection in (mha.w_q, mha.w_k, mha.w_v, mha.w_o):
        projection.weight.data = np.eye(4)
    q, k = _x(1, 2, 4), _x(1, 3, 4, seed=1)

    assert np.allclose(mha(q, k, k).data, scaled_dot_attention(q, k, k).data)


def test_should_match_a_scalar_loop_attention():
    q, k, v = _x(2, 3), _x(4, 3, seed=1), _x(4, 3, seed=2)
    expected = np.zeros((2, 3))
    for i in range(2):
        scores = [sum(q.data[i, c] * k.data[j, c] for c in range(3)) / np.sqrt(3.0) for j in range(4)]
        weights = np.exp(scores) / np.exp(scores).sum()
        for j in range(4):
            expected[i] += weights[j] * v.data[j]

    assert np.allclose(scaled_dot_attention(q, k, v).data, expected)


@pytest.mark.parametrize("seed", range(50))
def test_should_stay_within_the_value_range_of_each_column(seed):
    rng = np.random.default_rng(seed)
    q, k, v = (Tensor(rng.standard_normal(shape) * 3.0, dtype=np.float64)
               for shape in ((2, 3, 4), (2, 5, 4), (2, 5, 4)))
    mask = rng.random((2, 3, 5)) > 0.5
    mask[..., int(rng.integers(5))] = True
    out = scaled_dot_attention(q, k, v, mask).data
    low, high = v.data.min(axis=1, keepdims=True), v.data.max(axis=1, keepdims=True)

    assert np.all(out >= low - 1e-12)
    assert np.all(out <= high + 1e-12)


def test_should_equal_two_heads_assembled_by_hand():
    mha = MultiHeadAttention(6, 2, np.random.default_rng(3), np.float64)
    x, memory = _x(2, 3, 6), _x(2, 4, 6, seed=1)
    mask = np.array([True, True, False, True])
    q, k, v = matmul(x, mha.w_q.weight), matmul(memory, mha.w_k.weight), matmul(memory, mha.w_v.weight)
    heads = [scaled_dot_attention(narrow(q, 2, start, 3), narrow(k, 2, start, 3), narrow(v, 2, start, 3), mask)
             for start in (0, 3)]
    expected = matmul(concat_last_dim(*heads), mha.w_o.weight)

    assert np.allclose(mha(x, memory, memory, mask).data, expected.data)
