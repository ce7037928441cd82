import json

import numpy as np
import pytest

from ncagen import (
    ComplexityBand,
    FULL_BAND,
    GenConfig,
    ShardReader,
    VocabSpec,
    deserialize_tokens,
    generate_corpus,
    gzip_ratio,
    sidecar_path,
)
from ncagen.tokenizer import TokenSequence


@pytest.fixture
def fast_config():
    # full band accepts every rollout; generation cost is pure throughput
    return GenConfig(band=FULL_BAND, master_seed=9)


class TestBudgetAccounting:
    def test_default_budget_example(self, tmp_path, fast_config):
        stats = generate_corpus(fast_config, 98_800, tmp_path / "c.bin")
        assert stats["num_sequences"] == 100
        assert stats["total_tokens"] == 98_800

    def test_budget_rounds_up(self, tmp_path, fast_config):
        stats = generate_corpus(fast_config, 98_801, tmp_path / "c.bin")
        assert stats["num_sequences"] == 101

    def test_emitted_at_least_budget(self, tmp_path, fast_config):
        for budget in (1, 987, 988, 989):
            stats = generate_corpus(fast_config, budget, tmp_path / f"c{budget}.bin")
            assert budget <= stats["total_tokens"] < budget + 988


class TestDeterminism:
    def test_same_config_byte_identical(self, tmp_path, fast_config):
        generate_corpus(fast_config, 3 * 988, tmp_path / "a.bin")
        generate_corpus(fast_config, 3 * 988, tmp_path / "b.bin")
        assert (tmp_path / "a.bin").read_bytes() == (tmp_path / "b.bin").read_bytes()

    def test_worker_count_independent(self, tmp_path):
        config = GenConfig(band=ComplexityBand(20, 30), master_seed=4)
        generate_corpus(config, 6 * 988, tmp_path / "w1.bin", workers=1)
        generate_corpus(config, 6 * 988, tmp_path / "w2.bin", workers=2)
        assert (tmp_path / "w1.bin").read_bytes() == (tmp_path / "w2.bin").read_bytes()

    def test_sidecar_stats_reproducible(self, tmp_path):
        config = GenConfig(band=ComplexityBand(30, 40), master_seed=2)
        a = generate_corpus(config, 4 * 988, tmp_path / "a.bin")
        b = generate_corpus(config, 4 * 988, tmp_path / "b.bin", workers=2)
        assert a["attempts"] == b["attempts"]
        assert a["accepted_ratios_pct"] == b["accepted_ratios_pct"]


class TestShardContents:
    def test_sequences_decode_and_sit_in_band(self, tmp_path):
        config = GenConfig(band=ComplexityBand(50, None), master_seed=1)
        stats = generate_corpus(config, 3 * 988, tmp_path / "c.bin")
        reader = ShardReader(tmp_path / "c.bin")
        vocab = reader.header.vocab
        for i in range(len(reader)):
            traj = deserialize_tokens(
                TokenSequence(reader[i], vocab, 0), 12, 12
            )
            assert gzip_ratio(traj) > 50.0
        assert all(r > 50.0 for r in stats["accepted_ratios_pct"])

    def test_header_echoes_config(self, tmp_path, fast_config):
        generate_corpus(fast_config, 988, tmp_path / "c.bin")
        header = ShardReader(tmp_path / "c.bin").header
        assert header.alphabet_n == 10
        assert header.seq_len == 988
        assert header.master_seed == 9
        assert header.compressor_level == 6


class TestSidecar:
    def test_schema_and_integrity(self, tmp_path):
        config = GenConfig(band=ComplexityBand(30, 40), master_seed=8)
        out = tmp_path / "c.bin"
        stats = generate_corpus(config, 5 * 988, out)
        on_disk = json.loads(sidecar_path(out).read_text())
        assert on_disk["schema"] == "corpus_stats.v1"
        attempts = on_disk["attempts"]
        assert attempts["accepted"] + attempts["rejected"] == attempts["total"]
        assert attempts["accepted"] == 5
        assert attempts["acceptance_rate"] == pytest.approx(5 / attempts["total"])
        assert len(on_disk["accepted_ratios_pct"]) == 5
        band = config.band
        assert all(band.contains(r) for r in on_disk["accepted_ratios_pct"])
        assert on_disk["throughput"]["tokens_per_second"] > 0
        assert stats["num_sequences"] == 5

    def test_histogram_totals_match(self, tmp_path, fast_config):
        out = tmp_path / "c.bin"
        generate_corpus(fast_config, 4 * 988, out)
        on_disk = json.loads(sidecar_path(out).read_text())
        hist = on_disk["accepted_ratio_histogram"]
        assert sum(hist["counts"]) == hist["total"] == 4
