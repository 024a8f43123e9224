"""
Deterministic synthetic seq2seq corpora.

A source sequence belongs to exactly one split, decided by a hash of its
tokens, so held-out inputs never occur in the training split whatever seeds
the splits are drawn with.
"""

import hashlib
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from rtal.entities.exceptions import EEmptyCorpus
from rtal.entities.model.schema import FIRST_TOKEN_ID
from rtal.entities.task.schema import Split, SyntheticTask, TaskKind

SPLIT_BUCKETS = 10
MAX_ATTEMPTS_PER_PAIR = 1000

_BUCKET_OF_SPLIT = {Split.TEST: 0, Split.VALID: 1}
_SPLIT_STREAM = {Split.TRAIN: 0, Split.VALID: 1, Split.TEST: 2}

Pair = Tuple[List[int], List[int]]


def _target_strategy(kind: TaskKind) -> Callable[[List[int]], List[int]]:
    strategy: Dict[TaskKind, Callable[[List[int]], List[int]]] = {
        TaskKind.COPY: lambda source: list(source),
        TaskKind.REVERSE: lambda source: list(reversed(source)),
        TaskKind.SORT: lambda source: sorted(source),
    }

    return strategy[TaskKind(kind)]


def make_target(kind: TaskKind, source: Sequence[int]) -> List[int]:
    return _target_strategy(kind)(list(source))


def split_of(source: Sequence[int]) -> Split:
    digest = hashlib.blake2b(np.asarray(source, dtype=np.int64).tobytes(), digest_size=8).digest()
    bucket = int.from_bytes(digest, 'little') % SPLIT_BUCKETS
    for split, split_bucket in _BUCKET_OF_SPLIT.items():
        if bucket == split_bucket:
            return split
    return Split.TRAIN


def generate_task(task: SyntheticTask, split: Split, count: int, seed: int) -> List[Pair]:
    """`count` (source, target) pairs of `split`, drawn with replacement from its share of inputs."""
    rng = np.random.default_rng([seed, _SPLIT_STREAM[Split(split)]])
    target_of = _target_strategy(task.kind)
    pairs: List[Pair] = []
    attempts = 0
    while len(pairs) < count:
        attempts += 1
        if attempts > MAX_ATTEMPTS_PER_PAIR * max(count, 1):
            raise EEmptyCorpus(f"could not draw {count} {split.value} pairs for {task.kind.value}; "
                               f"the input space is too small")
        length = int(rng.integers(task.min_len, task.max_len + 1))
        source = rng.integers(FIRST_TOKEN_ID, task.vocab_size, size=length).tolist()
        if split_of(source) != split:
            continue
        pairs.append((source, target_of(source)))
    return pairs


def generate_splits(task: SyntheticTask, seed: int) -> Dict[Split, List[Pair]]:
    return {split: generate_task(task, split, task.size_of(split), seed) for split in Split}
