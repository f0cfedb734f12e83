"""Exception types shared across the package."""


class AddressingError(ValueError):
    """Bin index or coordinates outside the grid."""


class SamplingError(ValueError):
    """A bin cannot be sampled (empty intersection with the active range)."""


class NumericError(RuntimeError):
    """Non-finite values where finite numbers are required."""


class ConfigError(ValueError):
    """Invalid experiment configuration.

    Carries the offending field paths so CLI output can point at the
    exact keys.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class CheckpointError(RuntimeError):
    """Base class for checkpoint load/save failures."""


class CheckpointVersionError(CheckpointError):
    """Checkpoint format version does not match this code."""


class CorruptCheckpointError(CheckpointError):
    """Checkpoint file is truncated or structurally inconsistent."""
