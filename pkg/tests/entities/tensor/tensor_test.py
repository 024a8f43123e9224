import numpy as np
import pytest

from rtal.entities.exceptions import ENonFiniteValue, ENonScalarLoss
from rtal.entities.tensor.functional import (add, layer_norm, matmul, mul_elementwise, scale, softmax_last_dim,
                                             sum_all)
from rtal.entities.tensor.tensor import Tape, Tensor, no_grad, parameter, precision
from rtal.infrastructure.config import DefaultConfig


def test_should_accumulate_gradient_when_a_tensor_is_used_twice():
    x = parameter(np.array([1.0, 2.0, 3.0]))
    loss = sum_all(add(x, x))
    loss.backward()

    assert np.array_equal(x.grad, np.full(3, 2.0, dtype=np.float32))


def test_should_accumulate_gradient_across_a_diamond():
    x = parameter(np.array([1.0, -2.0]))
    a = scale(x, 3.0)
    b = mul_elementwise(x, x)
    sum_all(add(a, b)).backward()

    assert np.allclose(x.grad, 3.0 + 2.0 * np.array([1.0, -2.0]))


def test_should_fail_when_loss_is_not_scalar():
    x = parameter(np.ones((2, 2)))
    with pytest.raises(ENonScalarLoss) as execinfo:
        scale(x, 2.0).backward()

    assert "scalar loss" in str(execinfo.value)


def test_should_not_record_operations_under_no_grad():
    x = parameter(np.ones(3))
    with no_grad():
        y = scale(x, 2.0)

    assert y.requires_grad is False
    assert len(Tape.from_loss(sum_all(y))) == 0


def test_should_order_tape_inputs_before_outputs():
    x = parameter(np.ones(2))
    y = scale(x, 2.0)
    z = add(y, x)
    loss = sum_all(z)
    tape = Tape.from_loss(loss)
    outputs = [entry.output() for entry in tape]

    assert outputs.index(y) < outputs.index(z) < outputs.index(loss)


def test_should_use_precision_as_default_dtype():
    with precision(np.float64):
        inside = Tensor([1.0, 2.0])
    outside = Tensor([1.0, 2.0])

    assert inside.dtype == np.float64
    assert outside.dtype == np.float32


def test_should_keep_float_dtype_of_given_array():
    assert Tensor(np.zeros(2, dtype=np.float64)).dtype == np.float64


def test_should_leave_parameters_without_grad_until_backward():
    x = parameter(np.ones(2))
    assert x.grad is None
    sum_all(x).backward()
    x.zero_grad()
    assert x.grad is None


def test_should_raise_on_non_finite_output_in_debug_mode(monkeypatch):
    monkeypatch.setattr(DefaultConfig, "DEBUG_FINITE", True)
    x = Tensor(np.array([3e38], dtype=np.float32))
    with pytest.raises(ENonFiniteValue):
        scale(x, 10.0)


def test_should_allow_non_finite_output_outside_debug_mode(monkeypatch):
    monkeypatch.setattr(DefaultConfig, "DEBUG_FINITE", False)
    x = Tensor(np.array([3e38], dtype=np.float32))
    with np.errstate(over="ignore"):
        assert np.isinf(scale(x, 10.0).data).all()


def test_should_produce_identical_gradients_on_identical_runs():
    def run():
        rng = np.random.default_rng(11)
        weight = parameter(rng.standard_normal((4, 3)))
        gamma, shift = parameter(np.ones(3)), parameter(np.zeros(3))
        x = Tensor(rng.standard_normal((2, 5, 4)))
        hidden = layer_norm(matmul(x, weight), gamma, shift)
        loss = sum_all(mul_elementwise(softmax_last_dim(hidden), hidden))
        loss.backward()
        return loss.item(), [weight.grad, gamma.grad, shift.grad]

    first_loss, first_grads = run()
    second_loss, second_grads = run()

    assert first_loss == second_loss
    for first, second in zip(first_grads, second_grads):
        assert np.array_equal(first, second)
