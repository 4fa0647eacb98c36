import argparse
import logging
import sys
from typing import Optional, Sequence

import config
from src.handlers import compare, evolve, examples, similarity
from src.middlewares.middleware import AlarmMiddleware


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Similarity profiles of a silo filled by a granular source")
    subparsers = parser.add_subparsers(dest="verb", required=True)

    similarity.setup(subparsers)
    evolve.setup(subparsers)
    compare.setup(subparsers)
    examples.setup(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.quiet else config.LOG_LEVEL
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    return AlarmMiddleware()(args.handler, args)


if __name__ == "__main__":
    sys.exit(main())
