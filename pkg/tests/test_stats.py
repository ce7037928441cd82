import numpy as np
import pytest

from ncagen import (
    ComplexityBand,
    ConfigError,
    GenConfig,
    ShardHeader,
    generate_corpus,
    generate_dyck,
    shard_ratio_histogram,
    write_shard,
    zipf_report,
)
from ncagen.stats import fit_power_law


def dyck_like_shard(tmp_path, sequences, k=500):
    """Arbitrary token content under a Dyck header, for distribution tests."""
    seqs = [np.asarray(s) for s in sequences]
    header = ShardHeader.for_dyck(k, len(seqs[0]), len(seqs), 0)
    path = tmp_path / "synthetic.bin"
    write_shard(path, header, iter(seqs))
    return path


class TestFit:
    def test_exact_zipf_slope_is_minus_one(self):
        # frozen oracle: counts round(1e6 / r) fit over ranks 10..1000
        # gives slope -1.000002, r-squared 0.99999996
        counts = np.round(1e6 / np.arange(1, 2001))
        slope, intercept, r2, rank_range = fit_power_law(counts)
        assert slope == pytest.approx(-1.0, abs=0.05)
        assert r2 > 0.999
        assert rank_range == (10, 1000)
        assert intercept == pytest.approx(6.0, abs=0.01)

    def test_uniform_counts_fit_flat(self):
        slope, _, _, _ = fit_power_law(np.full(200, 50.0))
        assert slope == pytest.approx(0.0, abs=1e-12)

    def test_too_few_ranks_undefined(self):
        assert fit_power_law(np.array([5.0, 3.0])) == (None, None, None, None)
        assert fit_power_law(np.full(10, 7.0)) == (None, None, None, None)  # single point

    def test_window_clips_to_available(self):
        counts = np.round(1e4 / np.arange(1, 101))
        _, _, _, rank_range = fit_power_law(counts)
        assert rank_range == (10, 100)


class TestZipfReport:
    def test_exact_zipf_end_to_end(self, tmp_path):
        rng = np.random.default_rng(0)
        tokens = np.repeat(
            np.arange(400), np.round(2000 / np.arange(1, 401)).astype(int)
        )
        rng.shuffle(tokens)
        tokens = tokens[: len(tokens) - len(tokens) % 100].reshape(-1, 100)
        path = dyck_like_shard(tmp_path, list(tokens))
        report = zipf_report(path)
        assert report.slope == pytest.approx(-1.0, abs=0.05)
        assert report.r_squared > 0.99
        assert report.distinct_tokens == 400

    def test_degenerate_single_token(self, tmp_path):
        path = dyck_like_shard(tmp_path, [np.zeros(50, dtype=np.int64)] * 2)
        report = zipf_report(path)
        assert report.distinct_tokens == 1
        assert report.slope is None
        assert report.r_squared is None
        assert report.fit_rank_range is None

    def test_frequencies_sorted_and_normalized(self, tmp_path):
        rng = np.random.default_rng(1)
        seqs = [rng.integers(0, 300, 200) for _ in range(20)]
        report = zipf_report(dyck_like_shard(tmp_path, seqs))
        assert (np.diff(report.counts) <= 0).all()
        assert report.frequencies.sum() == pytest.approx(1.0, abs=1e-9)
        assert report.total_tokens == 20 * 200

    def test_delimiters_excluded_by_default(self, tmp_path):
        config = GenConfig(band=ComplexityBand(0, None), master_seed=3)
        path = tmp_path / "c.bin"
        generate_corpus(config, 3 * 988, path)
        vocab_ids = {10_000, 10_001}
        excluded = zipf_report(path)
        assert not vocab_ids & set(excluded.token_ids.tolist())
        included = zipf_report(path, include_delimiters=True)
        assert vocab_ids < set(included.token_ids.tolist())
        # one open and one close per timestep, 26 steps, 3 sequences
        by_id = dict(zip(included.token_ids.tolist(), included.counts.tolist()))
        assert by_id[10_000] == by_id[10_001] == 26 * 3
        assert included.total_tokens == excluded.total_tokens + 2 * 26 * 3

    def test_json_dict(self, tmp_path):
        rng = np.random.default_rng(2)
        report = zipf_report(
            dyck_like_shard(tmp_path, [rng.integers(0, 50, 100) for _ in range(5)])
        )
        d = report.to_json_dict(top=10)
        assert d["schema"] == "zipf_report.v1"
        assert len(d["top_tokens"]) == 10
        assert d["top_tokens"][0]["rank"] == 1


class TestShardRatioHistogram:
    def test_matches_generation_sidecar(self, tmp_path):
        config = GenConfig(band=ComplexityBand(40, 50), master_seed=6)
        path = tmp_path / "c.bin"
        stats = generate_corpus(config, 4 * 988, path)
        hist = shard_ratio_histogram(path)
        # sidecar ratios are rounded to 4 decimals
        np.testing.assert_allclose(
            np.sort(hist.ratios), np.sort(stats["accepted_ratios_pct"]), atol=5e-5
        )

    def test_dyck_rejected(self, tmp_path):
        path = tmp_path / "d.bin"
        generate_dyck(4, 400, 100, seed=0, out_path=path)
        with pytest.raises(ConfigError):
            shard_ratio_histogram(path)

    def test_max_sequences_cap(self, tmp_path):
        config = GenConfig(band=ComplexityBand(0, None), master_seed=6)
        path = tmp_path / "c.bin"
        generate_corpus(config, 5 * 988, path)
        assert shard_ratio_histogram(path, max_sequences=2).total == 2
