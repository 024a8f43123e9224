"""Corpus-level BLEU over token sequences, single reference, no smoothing."""

import collections
import math
from typing import Hashable, List, Optional, Sequence

from pydantic import BaseModel

from rtal.entities.exceptions import EEmptyCorpus, EShapeMismatch


class BleuReport(BaseModel):
    bleu: float
    precisions: List[float]
    brevity_penalty: float
    candidate_length: int
    reference_length: int
    exact_match: Optional[float] = None


def ngrams(segment: Sequence[Hashable], n: int) -> collections.Counter:
    counts = collections.Counter()
    for i in range(len(segment) - n + 1):
        counts[tuple(segment[i:i + n])] += 1
    return counts


def _statistics(candidates, references, max_n: int) -> collections.Counter:
    stats = collections.Counter()
    for candidate, reference in zip(candidates, references):
        for n in range(1, max_n + 1):
            guessed = ngrams(candidate, n)
            stats['guess', n] += sum(guessed.values())
            stats['match', n] += sum((guessed & ngrams(reference, n)).values())
        stats['candidate_length'] += len(candidate)
        stats['reference_length'] += len(reference)
    return stats


def bleu_report(candidates: Sequence[Sequence[Hashable]], references: Sequence[Sequence[Hashable]],
                max_n: int = 4) -> BleuReport:
    if not candidates:
        raise EEmptyCorpus("BLEU needs at least one candidate sentence")
    if len(candidates) != len(references):
        raise EShapeMismatch(f"{len(candidates)} candidates but {len(references)} references")

    stats = _statistics(candidates, references, max_n)
    precisions = [stats['match', n] / stats['guess', n] if stats['guess', n] else 0.0
                  for n in range(1, max_n + 1)]
    candidate_length = stats['candidate_length']
    reference_length = stats['reference_length']

    if candidate_length == 0:
        penalty = 0.0
    elif candidate_length < reference_length:
        penalty = math.exp(1.0 - reference_length / candidate_length)
    else:
        penalty = 1.0

    if min(precisions) == 0.0:
        score = 0.0
    else:
        score = penalty * math.exp(sum(math.log(p) for p in precisions) / max_n)

    return BleuReport(bleu=score, precisions=precisions, brevity_penalty=penalty,
                      candidate_length=candidate_length, reference_length=reference_length,
                      exact_match=exact_match(candidates, references))


def bleu(candidates: Sequence[Sequence[Hashable]], references: Sequence[Sequence[Hashable]],
         max_n: int = 4) -> float:
    return bleu_report(candidates, references, max_n).bleu


def exact_match(candidates: Sequence[Sequence[Hashable]], references: Sequence[Sequence[Hashable]]) -> float:
    if not candidates:
        raise EEmptyCorpus("exact match needs at least one candidate sentence")
    return sum(list(c) == list(r) for c, r in zip(candidates, references)) / len(candidates)
