"""Corpus statistics over shards: rank-frequency structure and gzip ratios."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from .complexity import RatioHistogram, build_histogram, gzip_ratio
from .errors import ConfigError
from .shard import ShardReader
from .tokenizer import TokenSequence, deserialize_tokens

__all__ = ["ZipfReport", "zipf_report", "shard_ratio_histogram"]

ZIPF_SCHEMA = "zipf_report.v1"


@dataclass(frozen=True)
class ZipfReport:
    """Token frequencies sorted by rank, with a log-log power-law fit.

    slope/r_squared are None when fewer than two ranks fall inside the
    fit window (degenerate corpora), never NaN.
    """

    token_ids: np.ndarray  # rank order: counts non-increasing, id breaks ties
    counts: np.ndarray
    frequencies: np.ndarray  # counts / total, sums to 1
    slope: float | None
    intercept: float | None  # of the log10 count fit, kept for plotting
    r_squared: float | None
    fit_rank_range: tuple[int, int] | None
    total_tokens: int
    distinct_tokens: int
    delimiters_included: bool

    def to_json_dict(self, top: int = 1000) -> dict:
        top = min(top, self.distinct_tokens)
        return {
            "schema": ZIPF_SCHEMA,
            "total_tokens": self.total_tokens,
            "distinct_tokens": self.distinct_tokens,
            "delimiters_included": self.delimiters_included,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "fit_rank_range": list(self.fit_rank_range) if self.fit_rank_range else None,
            "top_tokens": [
                {
                    "rank": r + 1,
                    "token_id": int(self.token_ids[r]),
                    "count": int(self.counts[r]),
                    "frequency": float(self.frequencies[r]),
                }
                for r in range(top)
            ],
        }


def fit_power_law(
    counts: np.ndarray, rank_lo: int = 10, rank_hi: int = 1000
) -> tuple[float | None, float | None, float | None, tuple[int, int] | None]:
    """Least-squares line through (log10 rank, log10 count), 1-based ranks.

    `counts` must be positive and sorted non-increasing. The window is
    clipped to the available ranks; an empty or single-point window has
    no defined line. Returns (slope, intercept, r_squared, rank range).
    """
    hi = min(rank_hi, len(counts))
    if hi - rank_lo + 1 < 2:
        return None, None, None, None
    ranks = np.arange(rank_lo, hi + 1)
    fit = linregress(np.log10(ranks), np.log10(counts[rank_lo - 1 : hi]))
    return float(fit.slope), float(fit.intercept), float(fit.rvalue**2), (rank_lo, hi)


def zipf_report(
    shard_path,
    include_delimiters: bool = False,
    rank_lo: int = 10,
    rank_hi: int = 1000,
) -> ZipfReport:
    """Rank-frequency statistics for one shard.

    Delimiter tokens are excluded by default: with one open and one close
    per timestep they sit at fixed high frequency and would dominate the
    head of the distribution. Dyck shards have no delimiters.
    """
    reader = ShardReader(shard_path)
    header = reader.header
    counts_by_id = np.bincount(reader.token_view().ravel(), minlength=header.vocab_size)
    if not header.is_dyck and not include_delimiters:
        counts_by_id[header.vocab.grid_open_id] = 0
        counts_by_id[header.vocab.grid_close_id] = 0
    ids = np.nonzero(counts_by_id)[0]
    order = np.lexsort((ids, -counts_by_id[ids]))
    ids = ids[order]
    counts = counts_by_id[ids]
    total = int(counts.sum())
    slope, intercept, r_squared, fit_range = fit_power_law(counts, rank_lo, rank_hi)
    return ZipfReport(
        token_ids=ids,
        counts=counts,
        frequencies=counts / max(total, 1),
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        fit_rank_range=fit_range,
        total_tokens=total,
        distinct_tokens=len(ids),
        delimiters_included=include_delimiters,
    )


def shard_ratio_histogram(shard_path, max_sequences: int | None = None) -> RatioHistogram:
    """Recompute per-sequence gzip ratios directly from shard tokens.

    Independent of the generation-time sidecar, so it also verifies band
    membership after the fact. NCA shards only: Dyck tokens have no cell
    byte serialization to compress.
    """
    reader = ShardReader(shard_path)
    header = reader.header
    if header.is_dyck:
        raise ConfigError("gzip ratios are defined for NCA shards, not Dyck shards")
    vocab = header.vocab
    count = len(reader) if max_sequences is None else min(max_sequences, len(reader))
    ratios = np.empty(count)
    for i in range(count):
        seq = TokenSequence(reader[i], vocab, rule_seed=0)
        traj = deserialize_tokens(seq, header.grid_h, header.grid_w)
        ratios[i] = gzip_ratio(traj)
    return build_histogram(ratios)
