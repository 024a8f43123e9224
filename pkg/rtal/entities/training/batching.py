from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from rtal.entities.exceptions import EEmptyCorpus
from rtal.entities.model.schema import BOS_ID, EOS_ID, PAD_ID

Pair = Tuple[List[int], List[int]]


@dataclass(frozen=True)
class Batch():
    source: np.ndarray
    target_in: np.ndarray
    target_out: np.ndarray


def pad_sequences(sequences: Sequence[Sequence[int]], pad_id: int = PAD_ID) -> np.ndarray:
    width = max(len(sequence) for sequence in sequences)
    padded = np.full((len(sequences), width), pad_id, dtype=np.int64)
    for row, sequence in enumerate(sequences):
        padded[row, :len(sequence)] = sequence
    return padded


def make_batch(pairs: Sequence[Pair]) -> Batch:
    if not pairs:
        raise EEmptyCorpus("cannot build a batch from zero pairs")
    return Batch(
        source=pad_sequences([source for source, _ in pairs]),
        target_in=pad_sequences([[BOS_ID] + list(target) for _, target in pairs]),
        target_out=pad_sequences([list(target) + [EOS_ID] for _, target in pairs]))


def make_batches(pairs: Sequence[Pair], tokens_per_batch: int) -> List[Batch]:
    """Groups consecutive pairs while rows x longest padded side stays within the token budget."""
    batches: List[Batch] = []
    current: List[Pair] = []
    longest = 0
    for pair in pairs:
        width = max(len(pair[0]), len(pair[1]) + 1)
        if current and (len(current) + 1) * max(longest, width) > tokens_per_batch:
            batches.append(make_batch(current))
            current, longest = [], 0
        current.append(pair)
        longest = max(longest, width)
    if current:
        batches.append(make_batch(current))
    return batches


class DataStream():
    """
    Endless stream of training batches.

    Each epoch shuffles the pairs with a generator seeded by (seed, epoch), so
    the batch for any step can be rebuilt without replaying the run.
    """

    def __init__(self, pairs: Sequence[Pair], tokens_per_batch: int, seed: int) -> None:
        if not pairs:
            raise EEmptyCorpus("the training split is empty")
        self.pairs = list(pairs)
        self.tokens_per_batch = tokens_per_batch
        self.seed = seed
        self._epochs: Dict[int, List[Batch]] = {}
        self._sizes: Dict[int, int] = {}

    def epoch_batches(self, epoch: int) -> List[Batch]:
        if epoch not in self._epochs:
            order = np.random.default_rng([self.seed, epoch]).permutation(len(self.pairs))
            self._epochs = {epoch: make_batches([self.pairs[i] for i in order], self.tokens_per_batch)}
            self._sizes[epoch] = len(self._epochs[epoch])
        return self._epochs[epoch]

    def _epoch_size(self, epoch: int) -> int:
        if epoch not in self._sizes:
            self.epoch_batches(epoch)
        return self._sizes[epoch]

    def position(self, step: int) -> Tuple[int, int]:
        """(epoch, offset) of the 1-based training step."""
        remaining = step - 1
        epoch = 0
        while remaining >= self._epoch_size(epoch):
            remaining -= self._epoch_size(epoch)
            epoch += 1
        return epoch, remaining

    def batch_for_step(self, step: int) -> Batch:
        epoch, offset = self.position(step)
        return self.epoch_batches(epoch)[offset]
