"""Synthetic token corpora from neural cellular automata.

Samples random local update rules, rolls them out on a torus, filters
trajectories by gzip-compressibility band, and serializes the survivors
into patch-token shards for language-model pre-pre-training. Ships a
balanced-bracket baseline generator, corpus statistics, and curve-based
transfer metrics. `ncagen.plots` (matplotlib) is imported lazily by the
CLI only.
"""

from .complexity import (
    COMPRESSOR_LEVEL,
    RatioHistogram,
    complexity_histogram,
    gzip_ratio,
    sample_in_band,
)
from .config import BAND_PRESETS, FULL_BAND, ComplexityBand, GenConfig
from .corpus import generate_corpus, sidecar_path
from .dyck import dyck_sequence, generate_dyck
from .errors import (
    ConfigError,
    MetricUndefinedError,
    NcagenError,
    PathologicalRuleError,
    RetriesExhausted,
    ShardFormatError,
    TokenParseError,
)
from .metrics import (
    TrainingCurve,
    compare_runs,
    convergence_speedup,
    read_curve,
    token_efficiency_gain,
    tokens_to_reach,
    write_curve,
)
from .nca import RuleParams, Trajectory, cell_logits, rollout, sample_init, sample_rule, step
from .render import parse_ascii, render_ascii, render_trajectory, write_pgm_frames
from .shard import ShardHeader, ShardReader, write_shard
from .stats import ZipfReport, shard_ratio_histogram, zipf_report
from .tokenizer import (
    TokenSequence,
    VocabSpec,
    decode_patch,
    deserialize_tokens,
    encode_patch,
    serialize_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "BAND_PRESETS",
    "COMPRESSOR_LEVEL",
    "ComplexityBand",
    "ConfigError",
    "FULL_BAND",
    "GenConfig",
    "MetricUndefinedError",
    "NcagenError",
    "PathologicalRuleError",
    "RatioHistogram",
    "RetriesExhausted",
    "RuleParams",
    "ShardFormatError",
    "ShardHeader",
    "ShardReader",
    "TokenParseError",
    "TokenSequence",
    "TrainingCurve",
    "Trajectory",
    "VocabSpec",
    "ZipfReport",
    "cell_logits",
    "compare_runs",
    "complexity_histogram",
    "convergence_speedup",
    "decode_patch",
    "deserialize_tokens",
    "dyck_sequence",
    "encode_patch",
    "generate_corpus",
    "generate_dyck",
    "gzip_ratio",
    "parse_ascii",
    "read_curve",
    "render_ascii",
    "render_trajectory",
    "rollout",
    "sample_in_band",
    "sample_init",
    "sample_rule",
    "serialize_trajectory",
    "shard_ratio_histogram",
    "sidecar_path",
    "step",
    "token_efficiency_gain",
    "tokens_to_reach",
    "write_curve",
    "write_pgm_frames",
    "write_shard",
    "zipf_report",
]
