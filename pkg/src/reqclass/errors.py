"""Exception and warning types shared across the package."""

from __future__ import annotations


class ReqclassError(Exception):
    """Base class for all errors raised by this package."""


# -- corpus loading ----------------------------------------------------------

class CorpusError(ReqclassError):
    """A requirements CSV or annotation file could not be loaded.

    ``row`` is the 1-based row (CSV) or line (CoNLL-U) number of the
    offending input, when known.
    """

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"{message} (row {row})"
        super().__init__(message)


class MissingColumnError(CorpusError):
    pass


class EmptyDatasetError(CorpusError):
    pass


class DuplicateReqIdError(CorpusError):
    pass


class MalformedRowError(CorpusError):
    pass


class MalformedConlluError(CorpusError):
    pass


class MissingReqIdError(CorpusError):
    pass


class CyclicDependencyError(CorpusError):
    pass


# -- feature extraction / vectorization --------------------------------------

class IndexOutOfRangeError(ReqclassError):
    """A role assignment referenced a token that does not exist."""


class EmptyVocabularyError(ReqclassError):
    """No feature term survived vocabulary construction (degenerate fold)."""


class EmptyInputError(ReqclassError):
    """An operation that needs at least one item received none."""


# -- model training / prediction ---------------------------------------------

class DimensionMismatchError(ReqclassError):
    pass


class NonFiniteInputError(ReqclassError):
    pass


# -- evaluation ---------------------------------------------------------------

class LengthMismatchError(ReqclassError):
    pass


class UnknownLabelError(ReqclassError):
    pass


class EmptyMatrixError(ReqclassError):
    pass


class KTooLargeError(ReqclassError):
    pass


class TooFewProjectsError(ReqclassError):
    pass


class MissingAnnotationError(ReqclassError):
    pass


# -- warnings ------------------------------------------------------------------

class ReqclassWarning(UserWarning):
    pass


class SingleClassWarning(ReqclassWarning):
    """Training data contained a single class; the model is a constant."""


class DegenerateMinWarning(ReqclassWarning):
    """The minority branch has at most one class; the hierarchy degenerates."""


class UnknownReqIdWarning(ReqclassWarning):
    """An annotation block references a req_id absent from the dataset."""
