"""
Differentiable kernels over `Tensor`.

Broadcasting is limited to leading batch dimensions: the operand with fewer
dimensions must equal the trailing dimensions of the other one.
"""

import math
from typing import Optional, Sequence, Tuple

import numpy as np

from rtal.entities.exceptions import EFullyMaskedRow, EIndexOutOfRange, EShapeMismatch
from rtal.entities.tensor.tensor import Tensor, apply_op


def _leading_broadcast(a: Tuple[int, ...], b: Tuple[int, ...], op: str) -> Tuple[int, ...]:
    short, long = (a, b) if len(a) <= len(b) else (b, a)
    if tuple(long[len(long) - len(short):]) != tuple(short):
        raise EShapeMismatch(
            f"{op}: shapes {a} and {b} differ outside the leading batch dimensions")
    return long


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    return grad


def add(a: Tensor, b: Tensor) -> Tensor:
    _leading_broadcast(a.shape, b.shape, "add")

    def backward(grad):
        return _unbroadcast(grad, a.shape), _unbroadcast(grad, b.shape)

    return apply_op(a.data + b.data, (a, b), backward)


def sub(a: Tensor, b: Tensor) -> Tensor:
    _leading_broadcast(a.shape, b.shape, "sub")

    def backward(grad):
        return _unbroadcast(grad, a.shape), -_unbroadcast(grad, b.shape)

    return apply_op(a.data - b.data, (a, b), backward)


def mul_elementwise(a: Tensor, b: Tensor) -> Tensor:
    _leading_broadcast(a.shape, b.shape, "mul_elementwise")

    def backward(grad):
        return _unbroadcast(grad * b.data, a.shape), _unbroadcast(grad * a.data, b.shape)

    return apply_op(a.data * b.data, (a, b), backward)


def scale(a: Tensor, s: float) -> Tensor:
    def backward(grad):
        return (grad * s,)

    return apply_op(a.data * s, (a,), backward)


def relu(a: Tensor) -> Tensor:
    active = a.data > 0

    def backward(grad):
        return (grad * active,)

    return apply_op(np.where(active, a.data, 0).astype(a.dtype), (a,), backward)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.ndim < 2 or b.ndim < 2:
        raise EShapeMismatch(f"matmul: operands need rank >= 2, got {a.shape} and {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise EShapeMismatch(
            f"matmul: inner dimensions differ, {a.shape} @ {b.shape} ({a.shape[-1]} != {b.shape[-2]})")
    _leading_broadcast(a.shape[:-2], b.shape[:-2], "matmul")

    def backward(grad):
        grad_a = np.matmul(grad, np.swapaxes(b.data, -1, -2))
        grad_b = np.matmul(np.swapaxes(a.data, -1, -2), grad)
        return _unbroadcast(grad_a, a.shape), _unbroadcast(grad_b, b.shape)

    return apply_op(np.matmul(a.data, b.data), (a, b), backward)


def concat_last_dim(a: Tensor, b: Tensor) -> Tensor:
    if a.shape[:-1] != b.shape[:-1]:
        raise EShapeMismatch(f"concat_last_dim: leading dimensions differ, {a.shape} and {b.shape}")
    split = a.shape[-1]

    def backward(grad):
        return grad[..., :split], grad[..., split:]

    return apply_op(np.concatenate([a.data, b.data], axis=-1), (a, b), backward)


def embedding_lookup(table: Tensor, ids: np.ndarray) -> Tensor:
    ids = np.asarray(ids)
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise EIndexOutOfRange(
            f"embedding_lookup: ids must lie in [0, {table.shape[0]}), got range [{ids.min()}, {ids.max()}]")

    def backward(grad):
        grad_table = np.zeros_like(table.data)
        np.add.at(grad_table, ids, grad)
        return (grad_table,)

    return apply_op(table.data[ids], (table,), backward)


def transpose_last_two(a: Tensor) -> Tensor:
    def backward(grad):
        return (np.swapaxes(grad, -1, -2),)

    return apply_op(np.swapaxes(a.data, -1, -2), (a,), backward)


def permute(a: Tensor, axes: Sequence[int]) -> Tensor:
    inverse = np.argsort(axes)

    def backward(grad):
        return (np.transpose(grad, inverse),)

    return apply_op(np.transpose(a.data, axes), (a,), backward)


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    shape = tuple(shape)
    if math.prod(shape) != a.size:
        raise EShapeMismatch(f"reshape: cannot view {a.shape} as {shape}")

    def backward(grad):
        return (grad.reshape(a.shape),)

    return apply_op(a.data.reshape(shape), (a,), backward)


def narrow(a: Tensor, axis: int, start: int, length: int) -> Tensor:
    index = [slice(None)] * a.ndim
    index[axis] = slice(start, start + length)
    index = tuple(index)

    def backward(grad):
        grad_a = np.zeros_like(a.data)
        grad_a[index] = grad
        return (grad_a,)

    return apply_op(a.data[index], (a,), backward)


def take(a: Tensor, index: int) -> Tensor:
    """Select one entry along the first axis, dropping that axis."""
    def backward(grad):
        grad_a = np.zeros_like(a.data)
        grad_a[index] = grad
        return (grad_a,)

    return apply_op(a.data[index], (a,), backward)


def sum_all(a: Tensor) -> Tensor:
    def backward(grad):
        return (np.full(a.shape, grad, dtype=a.dtype),)

    return apply_op(a.data.sum(), (a,), backward)


def softmax_last_dim(x: Tensor, mask: Optional[np.ndarray] = None) -> Tensor:
    logits = x.data
    if mask is not None:
        try:
            visible = np.broadcast_to(np.asarray(mask, dtype=bool), logits.shape)
        except ValueError as error:
            raise EShapeMismatch(f"softmax_last_dim: mask {np.shape(mask)} does not broadcast to {logits.shape}") from error
        if not visible.any(axis=-1).all():
            raise EFullyMaskedRow("softmax_last_dim: a row has every position masked")
        logits = np.where(visible, logits, -np.inf)

    shifted = logits - logits.max(axis=-1, keepdims=True)
    exps = np.exp(shifted)
    probs = (exps / exps.sum(axis=-1, keepdims=True)).astype(x.dtype)

    def backward(grad):
        return (probs * (grad - (grad * probs).sum(axis=-1, keepdims=True)),)

    return apply_op(probs, (x,), backward)


def log_softmax_last_dim(x: Tensor) -> Tensor:
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))

    def backward(grad):
        return (grad - np.exp(log_probs) * grad.sum(axis=-1, keepdims=True),)

    return apply_op(log_probs, (x,), backward)


def layer_norm(x: Tensor, gamma: Tensor, beta_shift: Tensor, eps: float = 1e-6) -> Tensor:
    width = x.shape[-1]
    if gamma.shape != (width,) or beta_shift.shape != (width,):
        raise EShapeMismatch(
            f"layer_norm: gamma {gamma.shape} and beta_shift {beta_shift.shape} must be ({width},)")
    if eps <= 0:
        raise ValueError("layer_norm: eps must be positive")

    centered = x.data - x.data.mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt((centered ** 2).mean(axis=-1, keepdims=True) + eps)
    normalized = centered * inv_std

    def backward(grad):
        leading = tuple(range(grad.ndim - 1))
        grad_gamma = (grad * normalized).sum(axis=leading)
        grad_beta = grad.sum(axis=leading)
        grad_norm = grad * gamma.data
        grad_x = inv_std * (
            grad_norm
            - grad_norm.mean(axis=-1, keepdims=True)
            - normalized * (grad_norm * normalized).mean(axis=-1, keepdims=True))
        return grad_x, grad_gamma, grad_beta

    return apply_op(normalized * gamma.data + beta_shift.data, (x, gamma, beta_shift), backward)


def dropout(x: Tensor, rate: float, rng: Optional[np.random.Generator]) -> Tensor:
    """Inverted dropout; `rng=None` means evaluation mode and returns `x` itself."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must lie in [0, 1), got {rate}")
    if rng is None or rate == 0.0:
        return x

    keep = (rng.random(x.shape) >= rate).astype(x.dtype) / x.dtype.type(1.0 - rate)

    def backward(grad):
        return (grad * keep,)

    return apply_op(x.data * keep, (x,), backward)
