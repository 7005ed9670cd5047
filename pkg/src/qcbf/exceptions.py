"""Exception types shared across the package."""


class RangeError(ValueError):
    """An index, exponent or coordinate is outside its legal range."""


class DimensionMismatch(ValueError):
    """Two ring elements or vectors with different moduli were combined."""


class UnsupportedParameter(ValueError):
    """A parameter combination the library refuses (e.g. even ring modulus)."""


class TableBuildError(ValueError):
    """Near-codeword table construction hit a degenerate key."""


class SamplingExhausted(RuntimeError):
    """Rejection sampling failed to produce an admissible vector in time."""


class DecoderStall(RuntimeError):
    """No counter is positive, so no flip can make progress."""


class ConfigError(ValueError):
    """An experiment or decoder configuration is malformed."""
