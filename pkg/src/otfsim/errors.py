"""Exception types raised across the simulator."""


class DimensionError(ValueError):
    """Grid/vector dimensions are invalid or inconsistent."""


class ConsistencyError(ValueError):
    """Mutually dependent parameters disagree (e.g. T * delta_f != 1)."""


class FormatError(ValueError):
    """A serialized artifact (tensor file, weight file) is malformed."""


class TruncationError(FormatError):
    """A serialized payload is shorter than its header promises."""


class LengthError(ValueError):
    """A sequence length does not match the modulation requirements."""


class CapacityError(ValueError):
    """A payload does not fit on the delay-Doppler grid."""


class SizeError(ValueError):
    """Problem size exceeds the dense-solver guard."""


class RangeError(ValueError):
    """A step index lies outside the schedule."""


class DimChainError(FormatError):
    """Predictor layer dimensions do not chain."""


class ConfigError(ValueError):
    """A run configuration file is invalid."""
