"""Exception types shared across the package."""


class DistboostError(Exception):
    """Base class for all package errors."""


class DegenerateInterval(DistboostError):
    """An outcome interval carries probability that underflowed to zero."""

    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"{message} (row {row})")
        self.row = row


class NotEnoughDistinctValues(DistboostError):
    """Fewer than two distinct outcome values; midpoint intervals undefined."""


class LineSearchBracketFailure(DistboostError):
    """No sign change of the summed score within the allowed bracket."""


class UncensoredOnly(DistboostError):
    """Operation requires every outcome interval to be a point (a == b)."""


class EmptyValidation(DistboostError):
    """Validation data set is empty."""


class UnboundedRoot(DistboostError):
    """Marginal CDF level of 0 or 1 has no finite transform value."""


class SchemaError(DistboostError):
    """Input data does not conform to the declared schema."""


class DataError(DistboostError):
    """Malformed input file; carries row/column provenance in the message."""
