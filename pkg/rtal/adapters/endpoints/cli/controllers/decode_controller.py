import argparse

from rtal.adapters.endpoints.cli.cli_injector import Injected
from rtal.business_rules.use_cases.decoding_use_case import DecodingUseCase, format_report
from rtal.infrastructure.config import DefaultConfig


def register(subparsers) -> None:
    parser = subparsers.add_parser("decode", help="decode a file of token-id lines with a trained run")
    parser.add_argument("run_dir")
    parser.add_argument("input_file", help="one space-separated source sequence per line")
    parser.add_argument("--output", help="output file (default: INPUT_FILE with a .decoded suffix)")
    parser.add_argument("--beam", type=int, default=DefaultConfig.BEAM_SIZE)
    parser.add_argument("--alpha", type=float, default=DefaultConfig.LENGTH_PENALTY)
    parser.add_argument("--max-len", type=int)
    parser.add_argument("--no-average", action="store_true", help="use the last checkpoint, not the averaged one")
    parser.add_argument("--references", help="reference file; writes bleu.txt and bleu.json to the run directory")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    decoding_use_case: DecodingUseCase = Injected(args, DecodingUseCase)
    result = decoding_use_case.decode(args.run_dir, args.input_file, args.output, args.beam, args.alpha,
                                      use_average=not args.no_average, references_path=args.references,
                                      max_len=args.max_len)
    print(result.output_path)
    if result.report is not None:
        print(format_report(result.report), end="")
    return 0
