"""Exception hierarchy for the hieradmm package."""


class HierAdmmError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(HierAdmmError):
    """Vectors of unequal length were combined."""


class EmptyInput(HierAdmmError):
    """An aggregation received no terms."""


class DegenerateWeights(HierAdmmError):
    """All aggregation weights sum to zero."""


class EmptyDataset(HierAdmmError):
    """A loss/gradient evaluation received no samples."""


class NonFiniteEvaluation(HierAdmmError):
    """A function evaluation produced NaN or Inf."""


class DivergenceDetected(HierAdmmError):
    """A training run exceeded the divergence guard.

    The run is halted and flagged; the metrics written so far stay valid.
    """

    def __init__(self, message, round_index=None, objective=None):
        super().__init__(message)
        self.round_index = round_index
        self.objective = objective


class TooFewSamples(HierAdmmError):
    """Fewer samples than clients to partition."""


class InsufficientClassSamples(HierAdmmError):
    """A label pool cannot cover the requested single-class shard sizes."""


class MalformedRow(HierAdmmError):
    """A CSV record did not match the expected layout."""

    def __init__(self, message, line_number):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class EmptyAfterFiltering(HierAdmmError):
    """Every CSV row was dropped by the missing-value filter."""


class IncomparableRuns(HierAdmmError):
    """Metrics files with mismatched dataset fingerprints were compared."""


class ConfigError(HierAdmmError):
    """Invalid or unknown configuration key/value."""
