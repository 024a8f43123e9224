"""
Beam search and greedy decoding over a next-token log-probability function.

A step function receives prefixes of shape (rows, t), every row starting with
BOS, and returns log-probabilities of shape (rows, vocab). Hypotheses finish
on EOS; PAD and BOS are never generated. Finished hypotheses are ranked by
logprob / ((5 + len) / 6) ** alpha with len counting the generated tokens
including EOS; ties go to the earlier finish, then to the smaller token
sequence.
"""

from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from rtal.entities.model.schema import BOS_ID, EOS_ID, PAD_ID
from rtal.entities.model.seq2seq import Seq2SeqModel, forward_step
from rtal.entities.tensor.tensor import no_grad

StepFn = Callable[[np.ndarray], np.ndarray]


class Hypothesis(BaseModel):
    tokens: List[int] = []
    logprob: float = 0.0
    finished: bool = False

    def score(self, alpha: float) -> float:
        return self.logprob / length_penalty(len(self.tokens), alpha)

    def rank_key(self, alpha: float) -> Tuple[float, int, List[int]]:
        return -self.score(alpha), len(self.tokens), self.tokens


def length_penalty(length: int, alpha: float) -> float:
    return ((5.0 + length) / 6.0) ** alpha


def _step_log_probs(step_fn: StepFn, alive: Sequence[Hypothesis]) -> np.ndarray:
    prefixes = np.asarray([[BOS_ID] + hypothesis.tokens for hypothesis in alive], dtype=np.int64)
    log_probs = np.array(step_fn(prefixes), dtype=np.float64)
    log_probs[:, PAD_ID] = -np.inf
    log_probs[:, BOS_ID] = -np.inf
    return log_probs


def _expand(alive: Sequence[Hypothesis], log_probs: np.ndarray, beam_size: int) -> List[Hypothesis]:
    scores = np.asarray([hypothesis.logprob for hypothesis in alive])[:, None] + log_probs
    rows, tokens = np.nonzero(np.isfinite(scores))
    candidates = [Hypothesis(tokens=alive[row].tokens + [int(token)],
                             logprob=float(scores[row, token]),
                             finished=int(token) == EOS_ID)
                  for row, token in zip(rows, tokens)]
    candidates.sort(key=lambda hypothesis: (-hypothesis.logprob, hypothesis.tokens))
    return candidates[:beam_size]


def _cannot_improve(finished: Sequence[Hypothesis], alive: Sequence[Hypothesis],
                    alpha: float, max_len: int) -> bool:
    if not finished or not alive:
        return not alive
    best_finished = max(hypothesis.score(alpha) for hypothesis in finished)
    best_reachable = max(hypothesis.logprob for hypothesis in alive) / length_penalty(max_len, alpha)
    return best_finished >= best_reachable


def beam_search_steps(step_fn: StepFn, beam_size: int, alpha: float, max_len: int) -> Hypothesis:
    """Best hypothesis; `finished` is False when nothing reached EOS within `max_len` tokens."""
    if beam_size < 1:
        raise ValueError(f"beam_size must be >= 1, got {beam_size}")
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")

    alive: List[Hypothesis] = [Hypothesis()]
    finished: List[Hypothesis] = []
    for _ in range(max_len):
        candidates = _expand(alive, _step_log_probs(step_fn, alive), beam_size)
        finished.extend(hypothesis for hypothesis in candidates if hypothesis.finished)
        alive = [hypothesis for hypothesis in candidates if not hypothesis.finished]
        if _cannot_improve(finished, alive, alpha, max_len):
            break

    pool = finished or alive
    return min(pool, key=lambda hypothesis: hypothesis.rank_key(alpha))


def greedy_steps(step_fn: StepFn, max_len: int) -> Hypothesis:
    hypothesis = Hypothesis()
    for _ in range(max_len):
        log_probs = _step_log_probs(step_fn, [hypothesis])[0]
        token = int(np.argmax(log_probs))
        hypothesis = Hypothesis(tokens=hypothesis.tokens + [token],
                                logprob=hypothesis.logprob + float(log_probs[token]),
                                finished=token == EOS_ID)
        if hypothesis.finished:
            break
    return hypothesis


def _model_step_fn(model: Seq2SeqModel, source: Sequence[int]) -> StepFn:
    encoded = model.encode(np.asarray([list(source)], dtype=np.int64))

    def step_fn(prefixes: np.ndarray) -> np.ndarray:
        return forward_step(model, encoded, prefixes).data

    return step_fn


def _bounded(model: Seq2SeqModel, max_len: Optional[int]) -> int:
    return min(max_len or model.config.max_len, model.config.max_len)


def beam_search(model: Seq2SeqModel, source: Sequence[int], beam_size: int = 4, alpha: float = 0.6,
                max_len: Optional[int] = None) -> Hypothesis:
    with no_grad():
        return beam_search_steps(_model_step_fn(model, source), beam_size, alpha, _bounded(model, max_len))


def greedy_decode(model: Seq2SeqModel, source: Sequence[int], max_len: Optional[int] = None) -> Hypothesis:
    with no_grad():
        return greedy_steps(_model_step_fn(model, source), _bounded(model, max_len))


def strip_eos(tokens: Sequence[int]) -> List[int]:
    return [token for token in tokens if token != EOS_ID]
