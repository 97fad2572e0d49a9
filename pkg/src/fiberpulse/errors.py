"""Exception hierarchy shared by all fiberpulse modules."""


class FiberPulseError(Exception):
    """Base class for every error raised by this package."""


# -- traces ------------------------------------------------------------------

class EmptySamples(FiberPulseError, ValueError):
    pass


class NonFiniteSample(FiberPulseError, ValueError):
    def __init__(self, index):
        super().__init__(f"non-finite sample at index {index}")
        self.index = index


class NonPositiveRate(FiberPulseError, ValueError):
    pass


class OutOfRange(FiberPulseError, ValueError):
    pass


class EmptyWindow(FiberPulseError, ValueError):
    pass


class MisalignedChannels(FiberPulseError, ValueError):
    pass


# -- simulation --------------------------------------------------------------

class InvalidTemplate(FiberPulseError, ValueError):
    pass


class InvalidConfig(FiberPulseError, ValueError):
    pass


class InvalidWindow(FiberPulseError, ValueError):
    pass


# -- dsp ---------------------------------------------------------------------

class BandOutOfRange(FiberPulseError, ValueError):
    pass


class SegmentTooLong(FiberPulseError, ValueError):
    pass


# -- pulse analysis ----------------------------------------------------------

class NoBeatsFound(FiberPulseError):
    pass


class NoMatchedPairs(FiberPulseError):
    pass


class FiducialOrderError(FiberPulseError, ValueError):
    pass


# -- vitals ------------------------------------------------------------------

class TooFewBeats(FiberPulseError, ValueError):
    pass


class TooFewIntervals(FiberPulseError, ValueError):
    pass


class EmptyInput(FiberPulseError, ValueError):
    pass


class NonPositiveDelay(FiberPulseError, ValueError):
    pass


class NonPositiveDistance(FiberPulseError, ValueError):
    pass


class NonPositiveSpeed(FiberPulseError, ValueError):
    pass


class TraceTooShort(FiberPulseError, ValueError):
    pass


class NoCadencePeak(FiberPulseError):
    pass


# -- files -------------------------------------------------------------------

class SchemaError(FiberPulseError, ValueError):
    """Malformed input file or config.

    ``row`` and ``column`` locate the offending cell when known (1-based row
    counting the header as row 1).
    """

    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column
