"""Command-line entry point wiring corpus prep, probing, and translation prep.

Exit codes: 0 success, 2 usage or configuration error, 3 expectation
mismatch, 4 probe cell failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .nmt.context import (
    DEFAULT_SEPARATOR,
    ContextError,
    build_doc_pairs,
    read_parallel_documents,
    write_parallel_corpus,
)
from .nmt.plans import (
    PlanError as NmtPlanError,
)
from .nmt.plans import (
    make_init_plan,
    seq2seq_architecture,
    single_layer_plan,
    write_init_plan,
    write_training_config,
)
from .pdtb.instances import (
    InstanceError,
    SplitConfigError,
    assign_splits,
    build_instances,
    corpus_stats,
    default_split_config,
    load_split_config,
    read_instances,
    write_instances,
)
from .pdtb.pipe import PipeFormatError, parse_pdtb
from .pdtb.senses import SenseMapError, default_sense_map, load_sense_map
from .probe.network import ProbeConfig, ProbeError
from .runner.matrix import TASKS, ModelSpec, plan_matrix
from .runner.matrix import PlanError as RunnerPlanError
from .runner.report import emit_report
from .runner.run import RunError, run_matrix
from .runner.synthetic import synthetic_corpus, synthetic_dump
from .store.format import DumpFormatError, read_dump
from .util import stable_seed

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_EXPECTATION = 3
EXIT_CELL_FAILURE = 4

# Published reference statistics for the standard section split:
# (total, explicit) per split.
REFERENCE_SPLIT_COUNTS = {
    "train": (32535, 18459),
    "valid": (1436, 812),
    "test": (1928, 1090),
}

_CONFIG_ERRORS = (
    ContextError,
    DumpFormatError,
    InstanceError,
    NmtPlanError,
    PipeFormatError,
    RunnerPlanError,
    SenseMapError,
    SplitConfigError,
    OSError,
    json.JSONDecodeError,
)


class UsageError(Exception):
    pass


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    return raw


def _resolve(args: argparse.Namespace, config: dict, key: str, default):
    """Flag wins over config file wins over default."""
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _write_resolved(resolved: dict, path: Path) -> None:
    path.write_text(
        json.dumps(resolved, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def cmd_convert(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    seed = int(_resolve(args, config, "seed", 0))
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        raise UsageError(f"corpus directory {corpus_dir} does not exist")
    out_path = Path(args.out)

    sense_map_path = _resolve(args, config, "sense-map", None)
    if sense_map_path is None:
        sense_map = default_sense_map()
    else:
        if not Path(sense_map_path).is_file():
            raise UsageError(f"sense map file {sense_map_path} does not exist")
        sense_map = load_sense_map(sense_map_path)
    split_path = _resolve(args, config, "split-config", None)
    split_config = default_split_config() if split_path is None else load_split_config(split_path)
    duplicate = bool(_resolve(args, config, "duplicate-per-sense", False))

    pipe_files = sorted(corpus_dir.rglob("*.pipe"))
    if not pipe_files:
        raise UsageError(f"no .pipe files under {corpus_dir}")
    instances = []
    for pipe_file in pipe_files:
        with open(pipe_file, encoding="utf-8") as handle:
            relations = parse_pdtb(handle, doc_id=pipe_file.stem)
        instances.extend(build_instances(relations, sense_map, duplicate_per_sense=duplicate))
    instances = assign_splits(instances, split_config)

    write_instances(instances, out_path)
    stats = corpus_stats(instances)
    stats_text = stats.to_json()
    Path(f"{out_path}.stats.json").write_text(stats_text + "\n", encoding="utf-8")
    print(stats_text)
    _write_resolved(
        {
            "command": "convert",
            "corpus": str(corpus_dir),
            "out": str(out_path),
            "sense_map": sense_map_path,
            "split_config": split_path,
            "duplicate_per_sense": duplicate,
            "seed": seed,
        },
        Path(f"{out_path}.config.json"),
    )

    if args.expect_table2:
        mismatches = []
        for split, (total, explicit) in REFERENCE_SPLIT_COUNTS.items():
            got_total, got_explicit = stats.total(split), stats.explicit(split)
            if (got_total, got_explicit) != (total, explicit):
                mismatches.append(
                    f"{split}: got total={got_total} explicit={got_explicit}, "
                    f"expected total={total} explicit={explicit}"
                )
        if mismatches:
            print("split counts differ from the reference statistics:", file=sys.stderr)
            for line in mismatches:
                print("  " + line, file=sys.stderr)
            return EXIT_EXPECTATION
        print("split counts match the reference statistics")
    return EXIT_OK


def cmd_manifest(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    seed = int(_resolve(args, config, "seed", 0))
    descriptor = json.loads(Path(args.model).read_text(encoding="utf-8"))
    for key in ("model_id", "layer_count", "hidden_dim"):
        if key not in descriptor:
            raise UsageError(f"model descriptor {args.model} lacks required key {key!r}")
    instances = read_instances(args.instances)
    payload = {
        "format": "DPRB0001",
        "model": descriptor,
        "instances": [
            {
                "id": inst.id,
                "text": inst.serialized_text,
                "arg1_char_span": list(inst.arg1_char_span),
                "arg2_char_span": list(inst.arg2_char_span),
                "connective_char_span": (
                    list(inst.connective_char_span) if inst.connective_char_span else None
                ),
                "relation_type": inst.relation_type,
                "label": inst.label,
                "label_index": inst.label_index,
                "split": inst.split,
            }
            for inst in instances
        ],
    }
    out_path = Path(args.out)
    out_path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    _write_resolved(
        {
            "command": "manifest",
            "instances": str(args.instances),
            "model": str(args.model),
            "out": str(out_path),
            "seed": seed,
        },
        Path(f"{out_path}.config.json"),
    )
    print(f"wrote manifest for {len(instances)} instances to {out_path}")
    return EXIT_OK


def cmd_probe(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    seed = int(_resolve(args, config, "seed", 0))
    workers = int(_resolve(args, config, "workers", 1))
    repeats = int(_resolve(args, config, "repeats", 1))
    if repeats < 1:
        raise UsageError(f"--repeats must be >= 1, got {repeats}")
    tasks = _resolve(args, config, "tasks", None)
    task_list = tuple(TASKS) if tasks is None else tuple(t.strip() for t in tasks.split(","))

    if args.synthetic:
        layer_count = int(_resolve(args, config, "layers", 12))
        hidden_dim = int(_resolve(args, config, "hidden-dim", 32))
        per_class = int(_resolve(args, config, "instances-per-class", 30))
        planted = args.planted_layer
        instances = synthetic_corpus(seed=seed, instances_per_class=per_class)
        manifest, matrices, alignments = synthetic_dump(
            instances,
            layer_count=layer_count,
            hidden_dim=hidden_dim,
            encoder_decoder=args.encoder_decoder,
            seed=seed,
            planted_layer=planted,
        )
        dumps = {manifest.model_id: (manifest, matrices, alignments)}
    else:
        if args.instances is None or not args.dump:
            raise UsageError("probe needs an instance file and at least one --dump (or --synthetic)")
        instances = read_instances(args.instances)
        dumps = {}
        for dump_path in args.dump:
            manifest, matrices, alignments = read_dump(dump_path)
            if manifest.model_id in dumps:
                raise UsageError(f"two dumps share model_id {manifest.model_id!r}")
            dumps[manifest.model_id] = (manifest, matrices, alignments)

    models = [
        ModelSpec(
            model_id=model_id,
            layer_count=entry[0].layer_count,
            has_cls=entry[0].cls_position is not None,
        )
        for model_id, entry in sorted(dumps.items())
    ]

    cells = []
    for repeat in range(repeats):
        master = seed if repeats == 1 else stable_seed("repeat", seed, repeat)
        cells.extend(plan_matrix(models, tasks=task_list, master_seed=master))

    probe_config = ProbeConfig(
        input_dim=1,
        hidden_dim=int(_resolve(args, config, "probe-hidden", 256)),
        class_count=21,
        seed=seed,
        learning_rate=float(_resolve(args, config, "learning-rate", 1e-3)),
        batch_size=int(_resolve(args, config, "batch-size", 64)),
        max_epochs=int(_resolve(args, config, "epochs", 50)),
        patience=int(_resolve(args, config, "patience", 5)),
    )

    rows = run_matrix(cells, instances, dumps, probe_config, workers=workers)
    emit_report(rows, out_dir)
    _write_resolved(
        {
            "command": "probe",
            "synthetic": args.synthetic,
            "instances": args.instances,
            "dumps": list(args.dump or []),
            "out": str(out_dir),
            "seed": seed,
            "workers": workers,
            "repeats": repeats,
            "tasks": list(task_list),
            "planted_layer": args.planted_layer,
            "probe": {
                "hidden_dim": probe_config.hidden_dim,
                "learning_rate": probe_config.learning_rate,
                "batch_size": probe_config.batch_size,
                "max_epochs": probe_config.max_epochs,
                "patience": probe_config.patience,
            },
        },
        out_dir / "resolved_config.json",
    )
    print((out_dir / "summary.txt").read_text(encoding="utf-8"), end="")

    failed = [row for row in rows if row.failed]
    if failed:
        print(f"{len(failed)} of {len(rows)} cells failed; see results.csv", file=sys.stderr)
        return EXIT_CELL_FAILURE
    return EXIT_OK


def cmd_nmt_prep(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    seed = int(_resolve(args, config, "seed", 0))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    separator = _resolve(args, config, "separator", DEFAULT_SEPARATOR)
    encoder_layers = int(_resolve(args, config, "encoder-layers", 12))
    decoder_layers = int(_resolve(args, config, "decoder-layers", 12))

    documents = read_parallel_documents(args.source, args.target)
    pairs = build_doc_pairs(documents, separator=separator)
    write_parallel_corpus(pairs, out_dir / "source.txt", out_dir / "target.txt")

    architecture = seq2seq_architecture(
        encoder_layers, decoder_layers, continuous_numbering=args.continuous_numbering
    )
    plan = make_init_plan(architecture, args.strategy)
    if args.layer is not None:
        plan = single_layer_plan(plan, args.layer)
    write_init_plan(plan, out_dir / "init_plan.json")
    write_training_config(out_dir / "training_config.json")
    _write_resolved(
        {
            "command": "nmt-prep",
            "source": str(args.source),
            "target": str(args.target),
            "out": str(out_dir),
            "strategy": args.strategy,
            "layer": args.layer,
            "separator": separator,
            "encoder_layers": encoder_layers,
            "decoder_layers": decoder_layers,
            "continuous_numbering": args.continuous_numbering,
            "seed": seed,
        },
        out_dir / "resolved_config.json",
    )
    print(
        f"wrote {len(pairs)} sentence pairs, init plan "
        f"({len(plan.trainable_names())} trainable groups), and training config to {out_dir}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dprobe",
        description="Layer-wise discourse probing over frozen transformer embeddings.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, help="master seed for reproducible outputs (default 0)")
        p.add_argument("--config", help="JSON config file; explicit flags override it")

    p = sub.add_parser("convert", help="parse an annotation corpus into a labeled instance file")
    p.add_argument("corpus", help="directory searched recursively for .pipe files")
    p.add_argument("--out", required=True, help="instance file to write (JSON lines)")
    p.add_argument("--sense-map", dest="sense_map", help="sense simplification table (TSV)")
    p.add_argument("--split-config", dest="split_config", help="split assignment table (TSV)")
    p.add_argument(
        "--duplicate-per-sense",
        dest="duplicate_per_sense",
        action="store_const",
        const=True,
        default=None,
        help="emit one instance per annotated sense instead of one per relation",
    )
    p.add_argument(
        "--expect-table2",
        action="store_true",
        help="exit 3 unless split counts match the published reference statistics",
    )
    common(p)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("manifest", help="emit the extraction hand-off manifest for a model")
    p.add_argument("instances", help="instance file from convert")
    p.add_argument("--model", required=True, help="model descriptor JSON")
    p.add_argument("--out", required=True, help="manifest path to write")
    common(p)
    p.set_defaults(func=cmd_manifest)

    p = sub.add_parser("probe", help="train probes over dump layers and report accuracy curves")
    p.add_argument("instances", nargs="?", help="instance file from convert")
    p.add_argument("--dump", action="append", help="embedding dump file (repeatable)")
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--tasks", help="comma list: whole-sentence,elements (default both)")
    p.add_argument("--workers", type=int, help="parallel cells (default 1)")
    p.add_argument("--repeats", type=int, help="run the whole matrix N times with varied seeds")
    p.add_argument("--synthetic", action="store_true", help="use a generated corpus and dump")
    p.add_argument("--planted-layer", dest="planted_layer", type=int,
                   help="synthetic only: layer carrying a linear class signal")
    p.add_argument("--layers", type=int, help="synthetic only: dump layer count (default 12)")
    p.add_argument("--hidden-dim", dest="hidden_dim", type=int,
                   help="synthetic only: dump width (default 32)")
    p.add_argument("--instances-per-class", dest="instances_per_class", type=int,
                   help="synthetic only: corpus size knob (default 30)")
    p.add_argument("--encoder-decoder", dest="encoder_decoder", action="store_true",
                   help="synthetic only: label half the layers encoder, half decoder")
    p.add_argument("--probe-hidden", dest="probe_hidden", type=int, help="probe hidden width")
    p.add_argument("--epochs", type=int, help="probe epoch cap")
    p.add_argument("--patience", type=int, help="early-stopping patience")
    p.add_argument("--batch-size", dest="batch_size", type=int, help="probe batch size")
    p.add_argument("--learning-rate", dest="learning_rate", type=float, help="probe learning rate")
    common(p)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("nmt-prep", help="emit context corpus, init plan, and training config")
    p.add_argument("--source", required=True, help="source sentences, blank line between documents")
    p.add_argument("--target", required=True, help="aligned target sentences")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--strategy", required=True, choices=("encoder", "decoder", "seq2seq"),
                   help="which side(s) the pretrained weights initialize")
    p.add_argument("--layer", type=int, help="freeze all but this layer's parameter groups")
    p.add_argument("--encoder-layers", dest="encoder_layers", type=int, help="default 12")
    p.add_argument("--decoder-layers", dest="decoder_layers", type=int, help="default 12")
    p.add_argument("--separator", help='context separator (default " [SEP] ")')
    p.add_argument("--continuous-numbering", dest="continuous_numbering", action="store_true",
                   help="number decoder layers after the encoder's")
    common(p)
    p.set_defaults(func=cmd_nmt_prep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ProbeError, RunError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CELL_FAILURE


if __name__ == "__main__":
    sys.exit(main())
