"""Exception types shared across the package."""


class PivotQGError(Exception):
    """Base class for all errors raised by this package."""


class EmptyInput(PivotQGError):
    pass


class OverlappingEdits(PivotQGError):
    pass


class RangeOutOfBounds(PivotQGError):
    pass


class AnnotatorUnavailable(PivotQGError):
    pass


class EmptySpan(PivotQGError):
    pass


class SpanMisaligned(PivotQGError):
    pass


class MalformedTags(PivotQGError):
    pass


class NonFiniteInput(PivotQGError):
    pass


class SequenceTooLong(PivotQGError):
    pass


class EmptyDataset(PivotQGError):
    pass


class DivergedLoss(PivotQGError):
    pass


class QuestionTooLong(PivotQGError):
    pass


class InvalidSpan(PivotQGError):
    pass


class UnresolvedFlags(PivotQGError):
    pass


class ModelUnavailable(PivotQGError):
    pass


class UnknownFormat(PivotQGError):
    pass
