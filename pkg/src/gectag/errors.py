"""Exception hierarchy shared by all modules."""


class GecTagError(Exception):
    """Base class for every error raised by this package."""


class DataError(GecTagError):
    """Bad input data. The CLI maps these to exit status 2."""


class MalformedTag(DataError):
    pass


class UnknownGTransformation(MalformedTag):
    pass


class SizeTooSmall(GecTagError, ValueError):
    pass


class MalformedEntry(DataError):
    pass


class NotApplicable(GecTagError):
    """A g-transformation cannot be executed on the given token."""


class LengthMismatch(DataError, ValueError):
    pass


class ShapeMismatch(DataError, ValueError):
    pass


class EmptyCorpus(DataError):
    pass


class MissingReference(DataError, KeyError):
    pass


class ChecksumMismatch(DataError):
    pass


class MalformedRecord(DataError):
    pass


class ExhaustedStream(DataError):
    pass


class TaggerFailure(GecTagError):
    def __init__(self, iteration: int, cause: BaseException):
        super().__init__(f"tagger failed at iteration {iteration}: {cause}")
        self.iteration = iteration
        self.cause = cause
