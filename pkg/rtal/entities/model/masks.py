"""Boolean attention masks; True marks a key position the query may attend to."""

import numpy as np

from rtal.entities.model.schema import PAD_ID


def source_mask(source_ids: np.ndarray, pad_id: int = PAD_ID) -> np.ndarray:
    """(B, 1, 1, S): every query sees the non-pad source keys."""
    source_ids = np.asarray(source_ids)
    return (source_ids != pad_id)[:, None, None, :]


def causal_mask(length: int) -> np.ndarray:
    return np.tril(np.ones((length, length), dtype=bool))


def target_mask(target_ids: np.ndarray, pad_id: int = PAD_ID) -> np.ndarray:
    """(B, 1, T, T): causal and key-not-pad."""
    target_ids = np.asarray(target_ids)
    keys = (target_ids != pad_id)[:, None, None, :]
    return causal_mask(target_ids.shape[-1])[None, None, :, :] & keys
