"""Layer-wise discourse-relation probing over frozen transformer embeddings.

Subpackages: ``pdtb`` (corpus preparation), ``store`` (embedding dump
format and feature pooling), ``probe`` (from-scratch classifier),
``runner`` (experiment matrix), ``nmt`` (translation-side preparation).
"""

from . import nmt, pdtb, probe, runner, store

__version__ = "0.1.0"

__all__ = ["nmt", "pdtb", "probe", "runner", "store", "__version__"]
