import numpy as np

from rtal.entities.exceptions import EEmptyTargets, EShapeMismatch
from rtal.entities.tensor.tensor import Tensor, apply_op


def smoothed_targets(targets: np.ndarray, vocab_size: int, eps_ls: float, dtype=np.float64) -> np.ndarray:
    """1 - eps on the gold class and eps / (V - 1) on every other class."""
    if vocab_size < 2:
        raise EShapeMismatch(f"label smoothing needs at least 2 classes, got {vocab_size}")
    dist = np.full(targets.shape + (vocab_size,), eps_ls / (vocab_size - 1), dtype=dtype)
    np.put_along_axis(dist, targets[..., None], 1.0 - eps_ls, axis=-1)
    return dist


def label_smoothed_ce(logits: Tensor, targets: np.ndarray, eps_ls: float, pad_id: int) -> Tensor:
    """
    Mean over non-pad tokens of KL(smoothed target || softmax(logits)).
    """
    targets = np.asarray(targets)
    if logits.ndim != 3 or logits.shape[:2] != targets.shape:
        raise EShapeMismatch(f"logits {logits.shape} do not match targets {targets.shape}")
    keep = targets != pad_id
    count = int(keep.sum())
    if count == 0:
        raise EEmptyTargets("every target position is padding")

    vocab_size = logits.shape[-1]
    shifted = logits.data - logits.data.max(axis=-1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    dist = smoothed_targets(targets, vocab_size, eps_ls, dtype=logits.dtype)
    entropy = np.where(dist > 0, dist * np.log(np.where(dist > 0, dist, 1.0)), 0.0)
    per_token = (entropy - dist * log_probs).sum(axis=-1)
    loss = (per_token * keep).sum() / count

    def backward(grad):
        grad_logits = ((np.exp(log_probs) - dist) * (keep[..., None] / count)).astype(logits.dtype)
        return (grad * grad_logits,)

    return apply_op(np.asarray(loss, dtype=logits.dtype), (logits,), backward)


def token_accuracy(logits: Tensor, targets: np.ndarray, pad_id: int) -> float:
    targets = np.asarray(targets)
    keep = targets != pad_id
    if not keep.any():
        raise EEmptyTargets("every target position is padding")
    hits = (logits.data.argmax(axis=-1) == targets) & keep
    return float(hits.sum() / keep.sum())
