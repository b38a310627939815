"""Command line: extract dumps from checkpoints, verify their alignments."""

from __future__ import annotations

import argparse
import sys

from transformers import AutoConfig

from .adapters import AdapterError
from .descriptor import (
    DescriptorError,
    FAMILIES,
    POOLING_LAST,
    POOLING_MEAN,
    descriptor_from_config,
)
from .dumpio import DumpWriteError, ManifestError
from .extract import ExtractionError, extract
from .verify import verify_alignment

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

_USAGE_ERRORS = (
    AdapterError,
    DescriptorError,
    DumpWriteError,
    ExtractionError,
    ManifestError,
    OSError,
    ValueError,
)


def cmd_extract(args: argparse.Namespace) -> int:
    config = AutoConfig.from_pretrained(args.checkpoint)
    descriptor = descriptor_from_config(
        args.checkpoint, config, family=args.family, max_length=args.max_length
    )
    records = extract(
        args.manifest,
        descriptor,
        args.out,
        batch_size=args.batch_size,
        pooling=args.pooling,
    )
    truncated = sum(r.truncated for r in records)
    print(
        f"embedded {len(records)} instances ({truncated} truncated) "
        f"across {descriptor.layer_count} layers into {args.out}"
    )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    report = verify_alignment(args.dump, args.instances)
    print(report.to_text(), end="")
    return EXIT_OK if report.ok else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dprobe-extract",
        description="Embed corpus instances with a frozen checkpoint, all layers.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("extract", help="write a layer-embedding dump for one checkpoint")
    p.add_argument("--manifest", required=True, help="hand-off manifest JSON")
    p.add_argument("--checkpoint", required=True, help="checkpoint path or identifier")
    p.add_argument("--out", required=True, help="dump file to write")
    p.add_argument("--family", choices=FAMILIES, help="override the inferred model family")
    p.add_argument("--batch-size", dest="batch_size", type=int, default=8)
    p.add_argument("--max-length", dest="max_length", type=int,
                   help="token budget per instance (default: checkpoint position limit)")
    p.add_argument("--pooling", choices=(POOLING_MEAN, POOLING_LAST), default=POOLING_MEAN,
                   help="sentence-vector convention for models without a classifier token")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("verify", help="check dumped token offsets against instance texts")
    p.add_argument("--dump", required=True, help="dump file from extract")
    p.add_argument("--instances", required=True, help="instance file the dump embeds")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
