"""PDTB 2.0 corpus preparation: parsing, sense simplification, serialization."""

from .instances import (
    CorpusStats,
    DiscourseInstance,
    InstanceError,
    SplitConfig,
    SplitConfigError,
    assign_splits,
    build_instance,
    build_instances,
    corpus_stats,
    default_split_config,
    load_split_config,
    parse_split_config,
    read_instances,
    write_instances,
)
from .pipe import PipeFormatError, RawRelation, format_pipe_line, parse_pdtb, parse_pipe_line
from .senses import (
    ENTREL_LABEL,
    NOREL_LABEL,
    PDTB_SENSE_INVENTORY,
    SenseMap,
    SenseMapError,
    default_sense_map,
    format_sense_map,
    load_sense_map,
    parse_sense_map,
    simplify_sense,
)

__all__ = [
    "CorpusStats",
    "DiscourseInstance",
    "ENTREL_LABEL",
    "InstanceError",
    "NOREL_LABEL",
    "PDTB_SENSE_INVENTORY",
    "PipeFormatError",
    "RawRelation",
    "SenseMap",
    "SenseMapError",
    "SplitConfig",
    "SplitConfigError",
    "assign_splits",
    "build_instance",
    "build_instances",
    "corpus_stats",
    "default_sense_map",
    "default_split_config",
    "format_pipe_line",
    "format_sense_map",
    "load_sense_map",
    "load_split_config",
    "parse_pdtb",
    "parse_pipe_line",
    "parse_sense_map",
    "parse_split_config",
    "read_instances",
    "simplify_sense",
    "write_instances",
]
