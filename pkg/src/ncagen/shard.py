"""Binary shard container: self-describing header + fixed-width tokens.

Layout (all little-endian):

    magic "NCAT" | version u16 | alphabet_n u16
    grid_h u16 | grid_w u16 | patch_h u16 | patch_w u16
    seq_len u32 | num_sequences u64 | master_seed u64
    band_low u16 | band_high u16 (0xFFFF = unbounded) | compressor_level u8

followed by num_sequences * seq_len tokens as u32. The header alone
determines vocabulary and framing; no sidecar is needed to read a shard.

Dyck shards reuse the container with patch_h = patch_w = grid_h = grid_w
= 0 and alphabet_n holding the bracket-type count k (vocabulary 2k);
band fields and compressor_level are written as 0/0xFFFF/0 and ignored.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ComplexityBand, GenConfig
from .errors import ShardFormatError
from .tokenizer import VocabSpec

MAGIC = b"NCAT"
FORMAT_VERSION = 1
UNBOUNDED = 0xFFFF

_HEADER = struct.Struct("<4sHHHHHHIQQHHB")
HEADER_SIZE = _HEADER.size  # 41 bytes


@dataclass(frozen=True)
class ShardHeader:
    alphabet_n: int
    grid_h: int
    grid_w: int
    patch_h: int
    patch_w: int
    seq_len: int
    num_sequences: int
    master_seed: int
    band_low: int
    band_high: int  # UNBOUNDED for "LO+" bands
    compressor_level: int
    format_version: int = FORMAT_VERSION

    @property
    def is_dyck(self) -> bool:
        return self.patch_h == 0

    @property
    def vocab_size(self) -> int:
        if self.is_dyck:
            return 2 * self.alphabet_n
        return self.vocab.total_vocab

    @property
    def vocab(self) -> VocabSpec:
        if self.is_dyck:
            raise ShardFormatError("Dyck shards have no patch vocabulary")
        return VocabSpec(self.alphabet_n, self.patch_h, self.patch_w)

    @property
    def band(self) -> ComplexityBand:
        high = None if self.band_high == UNBOUNDED else float(self.band_high)
        return ComplexityBand(float(self.band_low), high)

    @property
    def total_tokens(self) -> int:
        return self.num_sequences * self.seq_len

    def pack(self) -> bytes:
        return _HEADER.pack(
            MAGIC,
            self.format_version,
            self.alphabet_n,
            self.grid_h,
            self.grid_w,
            self.patch_h,
            self.patch_w,
            self.seq_len,
            self.num_sequences,
            self.master_seed,
            self.band_low,
            self.band_high,
            self.compressor_level,
        )

    @classmethod
    def unpack(cls, raw: bytes) -> "ShardHeader":
        if len(raw) < HEADER_SIZE:
            raise ShardFormatError(f"header truncated: {len(raw)} < {HEADER_SIZE} bytes")
        magic, version, n, gh, gw, ph, pw, seq_len, num, seed, lo, hi, lvl = _HEADER.unpack(
            raw[:HEADER_SIZE]
        )
        if magic != MAGIC:
            raise ShardFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != FORMAT_VERSION:
            raise ShardFormatError(f"unsupported format version {version}")
        return cls(
            alphabet_n=n,
            grid_h=gh,
            grid_w=gw,
            patch_h=ph,
            patch_w=pw,
            seq_len=seq_len,
            num_sequences=num,
            master_seed=seed,
            band_low=lo,
            band_high=hi,
            compressor_level=lvl,
            format_version=version,
        )

    @classmethod
    def for_nca(
        cls, config: GenConfig, num_sequences: int, compressor_level: int
    ) -> "ShardHeader":
        band_high = (
            UNBOUNDED if config.band.high_pct is None else round(config.band.high_pct)
        )
        return cls(
            alphabet_n=config.alphabet_n,
            grid_h=config.grid_h,
            grid_w=config.grid_w,
            patch_h=config.patch_h,
            patch_w=config.patch_w,
            seq_len=config.seq_tokens,
            num_sequences=num_sequences,
            master_seed=config.master_seed,
            band_low=round(config.band.low_pct),
            band_high=band_high,
            compressor_level=compressor_level,
        )

    @classmethod
    def for_dyck(
        cls, k: int, seq_len: int, num_sequences: int, master_seed: int
    ) -> "ShardHeader":
        return cls(
            alphabet_n=k,
            grid_h=0,
            grid_w=0,
            patch_h=0,
            patch_w=0,
            seq_len=seq_len,
            num_sequences=num_sequences,
            master_seed=master_seed,
            band_low=0,
            band_high=UNBOUNDED,
            compressor_level=0,
        )


def write_shard(path, header: ShardHeader, sequences) -> None:
    """Write header + sequences; on any failure the partial file is removed.

    `sequences` yields arrays of exactly header.seq_len tokens, in index
    order; the writer is the single ordered consumer, so shard bytes do
    not depend on how generation was parallelized.
    """
    path = Path(path)
    written = 0
    try:
        with open(path, "wb") as fh:
            fh.write(header.pack())
            for seq in sequences:
                tokens = np.ascontiguousarray(seq, dtype="<u4")
                if tokens.size != header.seq_len:
                    raise ShardFormatError(
                        f"sequence {written} has {tokens.size} tokens, "
                        f"expected {header.seq_len}"
                    )
                fh.write(tokens.tobytes())
                written += 1
        if written != header.num_sequences:
            raise ShardFormatError(
                f"wrote {written} sequences, header promised {header.num_sequences}"
            )
    except BaseException:
        if path.exists():
            os.unlink(path)
        raise


class ShardReader:
    """Memory-mapped random access to a shard's sequences."""

    def __init__(self, path):
        self.path = Path(path)
        with open(self.path, "rb") as fh:
            self.header = ShardHeader.unpack(fh.read(HEADER_SIZE))
        expected = HEADER_SIZE + 4 * self.header.total_tokens
        actual = self.path.stat().st_size
        if actual != expected:
            raise ShardFormatError(
                f"{self.path}: size {actual} != header-implied {expected}"
            )
        self._tokens = np.memmap(
            self.path,
            dtype="<u4",
            mode="r",
            offset=HEADER_SIZE,
            shape=(self.header.num_sequences, self.header.seq_len),
        )

    def __len__(self) -> int:
        return self.header.num_sequences

    def __getitem__(self, index: int) -> np.ndarray:
        if not 0 <= index < len(self):
            raise IndexError(
                f"sequence index {index} out of range (shard holds {len(self)})"
            )
        return np.asarray(self._tokens[index], dtype=np.int64)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def token_view(self) -> np.ndarray:
        """(num_sequences, seq_len) read-only u32 view of the whole payload."""
        return self._tokens
