"""Trajectory complexity via gzip ratio, and rejection sampling into bands.

The ratio is a cheap, monotone proxy for sequence complexity: the
Lempel-Ziv stage of DEFLATE upper-bounds Kolmogorov complexity, so
compressible trajectories have simple, predictable dynamics and
incompressible ones are chaotic.
"""

from __future__ import annotations

import dataclasses
import gzip
from dataclasses import dataclass

import numpy as np

from .config import BAND_PRESETS, FULL_BAND, ComplexityBand, GenConfig
from .errors import PathologicalRuleError, RetriesExhausted
from .nca import RuleParams, Trajectory, rollout, sample_rule
from .seeding import retry_sub_index

__all__ = [
    "BAND_PRESETS",
    "FULL_BAND",
    "ComplexityBand",
    "RatioHistogram",
    "complexity_histogram",
    "gzip_ratio",
    "sample_in_band",
]

# Ratios (hence band membership) depend on the compressor level, so it is
# fixed here and recorded in shard headers.
COMPRESSOR_LEVEL = 6


def trajectory_bytes(trajectory: Trajectory) -> bytes:
    """One byte per cell (raw state value), row-major, timesteps concatenated."""
    return trajectory.as_array().astype(np.uint8).tobytes()


def gzip_ratio(trajectory: Trajectory) -> float:
    """Percent ratio of gzip-compressed to raw trajectory bytes.

    Can exceed 100 on very short inputs (container overhead); never
    clamped, so band logic stays transparent.
    """
    raw = trajectory_bytes(trajectory)
    compressed = gzip.compress(raw, compresslevel=COMPRESSOR_LEVEL, mtime=0)
    return 100.0 * len(compressed) / len(raw)


def sample_in_band(
    master_seed: int, sequence_index: int, config: GenConfig
) -> tuple[RuleParams, Trajectory, int]:
    """Rejection-sample one rule whose trajectory lands in config.band.

    Attempt k draws the rule under sub-index mix64(sequence_index, k), so
    retries are deterministic and never perturb other sequences' streams.
    Rules producing non-finite logits are discarded like out-of-band ones.

    Returns (rule, trajectory annotated with its ratio, attempts used).
    """
    last_ratio = float("nan")
    for attempt in range(config.max_rejection_retries):
        rule = sample_rule(master_seed, retry_sub_index(sequence_index, attempt), config)
        try:
            traj = rollout(rule, config)
        except PathologicalRuleError:
            continue
        last_ratio = gzip_ratio(traj)
        if config.band.contains(last_ratio):
            traj = dataclasses.replace(traj, gzip_ratio_pct=last_ratio)
            return rule, traj, attempt + 1
    raise RetriesExhausted(config.max_rejection_retries, last_ratio, str(config.band))


@dataclass(frozen=True)
class RatioHistogram:
    """Binned gzip ratios of unfiltered rule samples, plus quartiles."""

    bin_edges: np.ndarray  # len(counts) + 1
    counts: np.ndarray
    ratios: np.ndarray  # raw per-sample ratios, sample order
    median: float
    q1: float
    q3: float

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_json_dict(self) -> dict:
        return {
            "schema": "ratio_histogram.v1",
            "bin_edges_pct": [float(e) for e in self.bin_edges],
            "counts": [int(c) for c in self.counts],
            "total": self.total,
            "median_pct": self.median,
            "q1_pct": self.q1,
            "q3_pct": self.q3,
        }


def build_histogram(ratios: np.ndarray, bin_width: float = 2.0) -> RatioHistogram:
    """Bin ratios into fixed-width percent bins covering [0, 110]."""
    edges = np.arange(0.0, 110.0 + bin_width, bin_width)
    counts, edges = np.histogram(ratios, bins=edges)
    return RatioHistogram(
        bin_edges=edges,
        counts=counts,
        ratios=ratios,
        median=float(np.median(ratios)),
        q1=float(np.percentile(ratios, 25)),
        q3=float(np.percentile(ratios, 75)),
    )


def complexity_histogram(count: int, config: GenConfig, bin_width: float = 2.0) -> RatioHistogram:
    """Ratio distribution over `count` unfiltered rule samples.

    Sample i uses the same sub-index as sample_in_band's first attempt for
    sequence i, so the histogram describes exactly the distribution the
    band filter draws from. The band in `config` is ignored.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    ratios = np.empty(count)
    for i in range(count):
        rule = sample_rule(config.master_seed, retry_sub_index(i, 0), config)
        ratios[i] = gzip_ratio(rollout(rule, config))
    return build_histogram(ratios, bin_width)
