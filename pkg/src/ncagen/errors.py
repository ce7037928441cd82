"""Exception hierarchy and CLI exit codes."""


class NcagenError(Exception):
    """Base class for all ncagen errors."""

    exit_code = 1


class ConfigError(NcagenError):
    """Invalid generation or harness configuration."""

    exit_code = 2


class RetriesExhausted(NcagenError):
    """Rejection sampling failed to land in the requested complexity band."""

    exit_code = 3

    def __init__(self, attempts: int, last_ratio: float, band: str, sequence_index: int | None = None):
        self.attempts = attempts
        self.last_ratio = last_ratio
        self.band = band
        self.sequence_index = sequence_index
        where = "" if sequence_index is None else f" for sequence {sequence_index}"
        super().__init__(
            f"no trajectory fell in band {band} after {attempts} attempts{where} "
            f"(last ratio {last_ratio:.2f}%)"
        )

    def __reduce__(self):
        # survives pickling across process boundaries
        return (type(self), (self.attempts, self.last_ratio, self.band, self.sequence_index))


class PathologicalRuleError(NcagenError):
    """A sampled rule produced non-finite logits; the rule must be discarded."""

    exit_code = 3

    def __init__(self, rule_seed: int):
        self.rule_seed = rule_seed
        super().__init__(f"non-finite logits under rule_seed={rule_seed:#018x}")

    def __reduce__(self):
        return (type(self), (self.rule_seed,))


class ShardFormatError(NcagenError):
    """Corrupt or unreadable shard file."""

    exit_code = 5


class TokenParseError(NcagenError):
    """Malformed token sequence; `offset` is the failing token position."""

    exit_code = 5

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (token offset {offset})")

    def __reduce__(self):
        return (type(self), (self.args[0].rsplit(" (token offset", 1)[0], self.offset))


class MetricUndefinedError(NcagenError):
    """A transfer metric is undefined for the given inputs."""

    exit_code = 2
