"""Generation configuration and complexity bands."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError


@dataclass(frozen=True)
class ComplexityBand:
    """A gzip-ratio acceptance interval, (low_pct, high_pct].

    `high_pct=None` marks an unbounded band ("50+"): any ratio strictly
    above low_pct is accepted.
    """

    low_pct: float
    high_pct: float | None = None

    def __post_init__(self):
        if self.low_pct < 0:
            raise ConfigError(f"band low must be >= 0, got {self.low_pct}")
        if self.high_pct is not None and self.high_pct <= self.low_pct:
            raise ConfigError(
                f"band must satisfy low < high, got {self.low_pct}-{self.high_pct}"
            )

    def contains(self, ratio_pct: float) -> bool:
        if ratio_pct <= self.low_pct:
            return False
        return self.high_pct is None or ratio_pct <= self.high_pct

    def __str__(self) -> str:
        if self.high_pct is None:
            return f"{self.low_pct:g}+"
        return f"{self.low_pct:g}-{self.high_pct:g}"

    @classmethod
    def parse(cls, text: str) -> "ComplexityBand":
        """Parse "LO-HI" or "LO+" band syntax, e.g. "30-40" or "50+"."""
        text = text.strip()
        try:
            if text.endswith("+"):
                return cls(float(text[:-1]), None)
            lo, hi = text.split("-", 1)
            return cls(float(lo), float(hi))
        except (ValueError, ConfigError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"cannot parse band {text!r}; expected LO-HI or LO+") from exc


# The four bands studied in the data-complexity ablation.
BAND_PRESETS = {
    "20-30": ComplexityBand(20, 30),
    "30-40": ComplexityBand(30, 40),
    "40-50": ComplexityBand(40, 50),
    "50+": ComplexityBand(50, None),
}

FULL_BAND = ComplexityBand(0, None)


@dataclass(frozen=True)
class GenConfig:
    """All knobs of one corpus generation run.

    `timesteps=None` derives the rollout length that exactly fills one
    training sequence: floor(max_seq_len / (patches_per_grid + 2)).
    """

    alphabet_n: int = 10
    grid_h: int = 12
    grid_w: int = 12
    patch_h: int = 2
    patch_w: int = 2
    temperature: float = 1e-3
    timesteps: int | None = None
    max_seq_len: int = 1024
    conv_channels: int = 4
    mlp_hidden: int = 16
    master_seed: int = 0
    band: ComplexityBand = field(default_factory=lambda: BAND_PRESETS["50+"])
    max_rejection_retries: int = 10_000
    # per-rule initialization dials (see nca.sample_rule); defaults cover
    # the full complexity spectrum from fixed points to noisy chaos
    rule_gain_range: tuple[float, float] = (1.0, 8.0)
    rule_scale_range: tuple[float, float] = (1e-3, 10.0)

    def __post_init__(self):
        if not 2 <= self.alphabet_n <= 256:
            # one byte per cell in the complexity byte stream caps n at 256
            raise ConfigError(f"alphabet_n must be in [2, 256], got {self.alphabet_n}")
        if self.grid_h < 1 or self.grid_w < 1 or self.patch_h < 1 or self.patch_w < 1:
            raise ConfigError("grid and patch dimensions must be positive")
        if self.grid_h % self.patch_h or self.grid_w % self.patch_w:
            raise ConfigError(
                f"grid {self.grid_h}x{self.grid_w} not divisible by "
                f"patch {self.patch_h}x{self.patch_w}"
            )
        if self.temperature <= 0:
            raise ConfigError(f"temperature must be > 0, got {self.temperature}")
        if self.conv_channels < 1 or self.mlp_hidden < 1:
            raise ConfigError("conv_channels and mlp_hidden must be positive")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must fit in 64 unsigned bits")
        if self.max_rejection_retries < 1:
            raise ConfigError("max_rejection_retries must be >= 1")
        for name in ("rule_gain_range", "rule_scale_range"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise ConfigError(f"{name} must satisfy 0 < low <= high, got ({lo}, {hi})")
        if self.timesteps is None:
            object.__setattr__(
                self, "timesteps", self.max_seq_len // self.tokens_per_step
            )
        if self.timesteps < 1:
            raise ConfigError(
                f"max_seq_len={self.max_seq_len} cannot fit a single "
                f"{self.tokens_per_step}-token timestep"
            )
        if self.timesteps * self.tokens_per_step > self.max_seq_len:
            raise ConfigError(
                f"{self.timesteps} timesteps x {self.tokens_per_step} tokens "
                f"exceed max_seq_len={self.max_seq_len}"
            )

    @property
    def patches_per_col(self) -> int:
        return self.grid_h // self.patch_h

    @property
    def patches_per_row(self) -> int:
        return self.grid_w // self.patch_w

    @property
    def patches_per_grid(self) -> int:
        return self.patches_per_col * self.patches_per_row

    @property
    def tokens_per_step(self) -> int:
        # open delimiter + patches + close delimiter
        return self.patches_per_grid + 2

    @property
    def seq_tokens(self) -> int:
        """Tokens one serialized trajectory occupies."""
        return self.timesteps * self.tokens_per_step
