"""Exception hierarchy shared across the toolkit.

Every error raised by this package derives from :class:`HrnvError` so callers
(CLI, batch runner, HTTP server) can catch record-level failures uniformly.
"""


class HrnvError(Exception):
    """Base class for all toolkit errors."""


# -- beat / interval model -------------------------------------------------

class FewerThanTwoPeaks(HrnvError):
    """A record with fewer than two R peaks cannot yield any interval."""


class EmptySeries(HrnvError):
    """An interval series with no values was passed to a metric."""


# -- QRS detection ---------------------------------------------------------

class SamplingRateTooLow(HrnvError):
    """Sampling rate below the minimum supported for QRS detection."""


class SegmentTooShort(HrnvError):
    """Selected signal segment is too short to analyze."""


class UnknownPeak(HrnvError):
    """A peak-removal target is not present in the annotation set."""


class DuplicatePeak(HrnvError):
    """A peak-addition target is already annotated."""


class OutOfRange(HrnvError):
    """A peak index lies outside the record's sample range."""


# -- RRI preprocessing -----------------------------------------------------

class NothingClean(HrnvError):
    """Every interval was flagged abnormal; repair is impossible."""


# -- interval transform ----------------------------------------------------

class InvalidParameters(HrnvError):
    """Transform or plan parameters violate 1 <= m <= n."""


# -- spectral estimation ---------------------------------------------------

class TooFewIntervals(HrnvError):
    """Not enough intervals for spectral estimation."""


class TooShort(HrnvError):
    """Series too short for the requested computation."""


class BurgOrderTooHigh(HrnvError):
    """Autoregressive order is not below the tachogram length."""


# -- comparison harness ----------------------------------------------------

class CountMismatch(HrnvError):
    """Annotation sets of different sizes cannot be compared elementwise."""

    def __init__(self, count_a: int, count_b: int):
        super().__init__(f"peak counts differ: {count_a} vs {count_b}")
        self.count_a = count_a
        self.count_b = count_b


class PlanMismatch(HrnvError):
    """Reports for different (record, n, m) triples cannot be compared."""


class BatchTypeViolation(HrnvError):
    """ECG input in a batch without the unattended-ECG flag."""


# -- file formats ------------------------------------------------------------

class MalformedNumeric(HrnvError):
    """A field in an input file failed to parse as a number."""

    def __init__(self, message: str, line: int, field: int = 1):
        super().__init__(f"{message} (line {line}, field {field})")
        self.line = line
        self.field = field


class MixedLayout(HrnvError):
    """Input file mixes multi-row and multi-column layouts."""


class EmptyFile(HrnvError):
    """Input file contains no numeric data."""


class SchemaViolation(HrnvError):
    """A peaks file is missing required headers or is malformed."""


class WriteFailure(HrnvError):
    """Report or annotation file could not be written."""


# -- review server -----------------------------------------------------------

class NotFound(HrnvError):
    """No record with the requested id is loaded."""


class VersionConflict(HrnvError):
    """Peak edit submitted against a stale annotation version."""

    def __init__(self, expected: int, current: int):
        super().__init__(
            f"expected annotation version {expected}, current is {current}"
        )
        self.expected = expected
        self.current = current
