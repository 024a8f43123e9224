import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from injector import inject
from pydantic import BaseModel

from rtal.business_rules.use_cases.checkpoint_use_case import CheckpointUseCase
from rtal.entities.decoding.beam_search import beam_search, greedy_decode, strip_eos
from rtal.entities.evaluation.bleu import BleuReport, bleu_report
from rtal.entities.experiment.repository import IRunRepository
from rtal.entities.model.seq2seq import Seq2SeqModel

logger = logging.getLogger(__name__)

BLEU_TEXT = "bleu.txt"
BLEU_JSON = "bleu.json"


class DecodeResult(BaseModel):
    output_path: str
    sentences: int
    report: Optional[BleuReport] = None


def decode_all(model: Seq2SeqModel, sources: Sequence[Sequence[int]], beam_size: int, alpha: float,
               max_len: Optional[int] = None) -> List[List[int]]:
    """Decoded token sequences without EOS; beam size 1 is greedy decoding."""
    outputs = []
    for source in sources:
        if beam_size == 1:
            hypothesis = greedy_decode(model, source, max_len)
        else:
            hypothesis = beam_search(model, source, beam_size, alpha, max_len)
        if not hypothesis.finished:
            logger.warning(f"no hypothesis reached EOS for source {list(source)}; keeping the best unfinished one")
        outputs.append(strip_eos(hypothesis.tokens))
    return outputs


def format_report(report: BleuReport) -> str:
    rows = [("BLEU", f"{report.bleu:.4f}")]
    rows += [(f"p{n}", f"{precision:.4f}") for n, precision in enumerate(report.precisions, start=1)]
    rows += [("BP", f"{report.brevity_penalty:.4f}"),
             ("hyp_len", str(report.candidate_length)),
             ("ref_len", str(report.reference_length)),
             ("exact_match", f"{report.exact_match:.4f}")]
    width = max(len(name) for name, _ in rows)
    return "".join(f"{name.ljust(width)}  {value}\n" for name, value in rows)


@inject
@dataclass
class DecodingUseCase():
    run_repository: IRunRepository
    checkpoint_use_case: CheckpointUseCase

    def decode(self, run_dir: Path, input_path: Path, output_path: Optional[Path] = None, beam_size: int = 4,
               alpha: float = 0.6, use_average: bool = True, references_path: Optional[Path] = None,
               max_len: Optional[int] = None) -> DecodeResult:
        run_dir = Path(run_dir)
        sources = self.run_repository.read_sequences(input_path)
        model = self.checkpoint_use_case.load_model(run_dir, use_average)
        outputs = decode_all(model, sources, beam_size, alpha, max_len)
        output_path = Path(output_path) if output_path else Path(input_path).with_suffix(".decoded")
        self.run_repository.write_sequences(output_path, outputs)
        logger.info(f"decoded {len(outputs)} sentence(s) with beam {beam_size}, alpha {alpha} into {output_path}")

        result = DecodeResult(output_path=str(output_path), sentences=len(outputs))
        if references_path is not None:
            report = bleu_report(outputs, self.run_repository.read_sequences(references_path, allow_blank=True))
            self.run_repository.write_report(run_dir, BLEU_TEXT, format_report(report))
            self.run_repository.write_report(run_dir, BLEU_JSON, report.json(indent=2) + "\n")
            logger.info(f"BLEU {report.bleu:.4f}, exact match {report.exact_match:.4f}")
            result.report = report
        return result
