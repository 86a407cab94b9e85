"""
Error Types

One exception class per failure the engine can report.
"""

from typing import Any, Optional


class BidCurveError(Exception):
    """Base class for every engine error."""


class TooFewObservations(BidCurveError, ValueError):
    """Fewer than four distinct bid buckets for a campaign."""


class InconsistentCampaign(BidCurveError, ValueError):
    """Observations mix campaign ids or CTR values."""


class EmptyLandscape(BidCurveError, ValueError):
    """A landscape or curve without points was queried."""


class ZeroCtr(BidCurveError, ValueError):
    """CTR is zero where a division by CTR is required."""


class InvalidParams(BidCurveError, ValueError):
    """Model parameters violate their kind's invariants."""


class TooFewPoints(BidCurveError, ValueError):
    """Not enough data points for the requested computation."""


class DegenerateData(BidCurveError, ValueError):
    """All costs identical, or all clicks identical at distinct costs."""


class NonFiniteFit(BidCurveError, ArithmeticError):
    """Fitting overflowed; `result` holds the last finite iterate."""

    def __init__(self, message: str, result: Optional[Any] = None):
        super().__init__(message)
        self.result = result


class OutOfRange(BidCurveError, ValueError):
    """Query outside the range a predictor can answer."""


class NotConverged(BidCurveError, ValueError):
    """A recommendation was requested from a fit that did not converge."""


class LengthMismatch(BidCurveError, ValueError):
    """Actual and predicted series differ in length or are empty."""


class ZeroActual(BidCurveError, ValueError):
    """MAPE denominator is zero."""

    def __init__(self, index: int):
        super().__init__(f"actual value at index {index} is zero")
        self.index = index


class ZeroCostSpan(BidCurveError, ValueError):
    """Adjacent curve points share a cost."""


class ZeroDerivative(BidCurveError, ValueError):
    """Empirical derivative is zero where it is used as a denominator."""


class ZeroDenominator(BidCurveError, ValueError):
    """Click, spend or cost is zero where a ratio needs it."""


class ZeroCurrent(BidCurveError, ValueError):
    """Current bid or clicks are zero, so lift ratios are undefined."""


class InvalidConfig(BidCurveError, ValueError):
    """Market or run configuration is invalid."""


class ParseError(BidCurveError, ValueError):
    """An input row could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")
        self.line = line


class RunIoError(BidCurveError, OSError):
    """Input or output file could not be read or written."""
