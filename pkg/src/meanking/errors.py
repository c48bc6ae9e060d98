"""Exception hierarchy shared by the library and the command line."""


class MeanKingError(ValueError):
    """Base class for bad input: wrong shapes, unsupported parameters, malformed files."""


class DimensionError(MeanKingError):
    pass


class UnsupportedError(MeanKingError):
    pass


class RowCapError(MeanKingError):
    pass


class VerificationError(Exception):
    """An invariant check failed; ``report`` holds the failing record."""

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))
