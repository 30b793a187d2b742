"""Command-line front end.

    embed-extract --input qa.jsonl --model toy-768 --output feats.bhft
    embed-extract --input five.jsonl --model toy-768 --output feats.bhft \
        --reduce-five-to-three --seed 0
"""

import argparse
import json
import sys

from .encoder import UnknownModelError
from .extract import DEFAULT_MAX_LENGTH, extract, reduce_and_extract
from .records import RecordError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-extract",
        description="Encode question/option pairs with a frozen encoder "
                    "and write a binary feature table")
    parser.add_argument("--input", required=True, help="JSON-lines questions")
    parser.add_argument("--model", required=True, help="encoder name")
    parser.add_argument("--output", required=True, help="feature file to write")
    parser.add_argument("--max-length", type=int, default=DEFAULT_MAX_LENGTH,
                        help="token budget per pair (default %(default)s)")
    parser.add_argument("--reduce-five-to-three", action="store_true",
                        help="cut 5-option records to 3 before encoding")
    parser.add_argument("--seed", type=int,
                        help="reduction seed (required with "
                             "--reduce-five-to-three)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.reduce_five_to_three:
            if args.seed is None:
                print("error: --reduce-five-to-three requires --seed",
                      file=sys.stderr)
                return 1
            summary = reduce_and_extract(args.input, args.model, args.output,
                                         args.seed, max_length=args.max_length)
        else:
            if args.seed is not None:
                print("error: --seed only applies with "
                      "--reduce-five-to-three", file=sys.stderr)
                return 1
            summary = extract(args.input, args.model, args.output,
                              max_length=args.max_length)
    except (RecordError, UnknownModelError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
