"""Translation-side preparation: context corpus and initialization plans."""

from .context import (
    DEFAULT_SEPARATOR,
    ContextError,
    DocPair,
    build_doc_pairs,
    read_parallel_documents,
    write_parallel_corpus,
)
from .plans import (
    INIT_FROM_PLM,
    INIT_RANDOM,
    PROBE_INFORMED_LAYERS,
    SIDE_DECODER,
    SIDE_EMBEDDING,
    SIDE_ENCODER,
    SIDE_HEAD,
    SIDES,
    STRATEGIES,
    STRATEGY_DECODER,
    STRATEGY_ENCODER,
    STRATEGY_SEQ2SEQ,
    InitPlan,
    ParamGroup,
    PlanEntry,
    PlanError,
    make_init_plan,
    plan_to_dict,
    seq2seq_architecture,
    single_layer_plan,
    training_config,
    write_init_plan,
    write_training_config,
)

__all__ = [
    "DEFAULT_SEPARATOR",
    "INIT_FROM_PLM",
    "INIT_RANDOM",
    "PROBE_INFORMED_LAYERS",
    "SIDES",
    "SIDE_DECODER",
    "SIDE_EMBEDDING",
    "SIDE_ENCODER",
    "SIDE_HEAD",
    "STRATEGIES",
    "STRATEGY_DECODER",
    "STRATEGY_ENCODER",
    "STRATEGY_SEQ2SEQ",
    "ContextError",
    "DocPair",
    "InitPlan",
    "ParamGroup",
    "PlanEntry",
    "PlanError",
    "build_doc_pairs",
    "make_init_plan",
    "plan_to_dict",
    "read_parallel_documents",
    "seq2seq_architecture",
    "single_layer_plan",
    "training_config",
    "write_init_plan",
    "write_parallel_corpus",
    "write_training_config",
]
