import numpy as np
import pytest

from rtal.entities.exceptions import EEmptyCorpus
from rtal.entities.training.batching import DataStream, make_batch, make_batches, pad_sequences


def _pairs(count):
    return [([3 + i % 5] * (1 + i % 4), [4 + i % 3] * (1 + i % 3)) for i in range(count)]


def test_should_shift_targets_around_bos_and_eos():
    batch = make_batch([([3, 4, 5], [5, 4]), ([6], [7, 8, 9])])

    assert batch.source.tolist() == [[3, 4, 5], [6, 0, 0]]
    assert batch.target_in.tolist() == [[1, 5, 4, 0], [1, 7, 8, 9]]
    assert batch.target_out.tolist() == [[5, 4, 2, 0], [7, 8, 9, 2]]


def test_should_pad_to_the_longest_sequence():
    assert pad_sequences([[1], [2, 3, 4]]).tolist() == [[1, 0, 0], [2, 3, 4]]


def test_should_fail_on_an_empty_batch():
    with pytest.raises(EEmptyCorpus):
        make_batch([])


def test_should_respect_the_token_budget():
    batches = make_batches(_pairs(40), tokens_per_batch=12)

    assert sum(batch.source.shape[0] for batch in batches) == 40
    for batch in batches:
        width = max(batch.source.shape[1], batch.target_in.shape[1])
        assert batch.source.shape[0] == 1 or batch.source.shape[0] * width <= 12


def test_should_rebuild_any_step_deterministically():
    pairs = _pairs(30)
    first, second = DataStream(pairs, 10, seed=5), DataStream(pairs, 10, seed=5)

    for step in [1, 7, 40, 3, 100]:
        assert np.array_equal(first.batch_for_step(step).source, second.batch_for_step(step).source)


def test_should_shuffle_each_epoch_differently():
    stream = DataStream(_pairs(30), 10, seed=5)
    first = [batch.source.tolist() for batch in stream.epoch_batches(0)]
    second = [batch.source.tolist() for batch in stream.epoch_batches(1)]

    assert first != second


def test_should_walk_into_the_next_epoch():
    stream = DataStream(_pairs(30), 10, seed=5)
    size = len(stream.epoch_batches(0))

    assert stream.position(1) == (0, 0)
    assert stream.position(size) == (0, size - 1)
    assert stream.position(size + 1) == (1, 0)


def test_should_fail_on_an_empty_corpus():
    with pytest.raises(EEmptyCorpus):
        DataStream([], 10, seed=0)
