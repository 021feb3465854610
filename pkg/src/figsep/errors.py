"""Exception hierarchy for figsep.

Corpus problems are split into distinct kinds so callers can tell a broken
file apart from a broken annotation; everything inherits from FigsepError.
"""


class FigsepError(Exception):
    """Base class for all figsep-specific errors."""


class CorpusError(FigsepError):
    """Base class for corpus loading/validation failures."""


class MissingImageError(CorpusError):
    """An annotation references an image file that does not exist."""


class MalformedAnnotationError(CorpusError):
    """An annotation line could not be parsed or has invalid fields."""


class DanglingClassError(CorpusError):
    """A subfigure references a label class absent from the record's labels."""


class CheckpointMismatchError(FigsepError):
    """A checkpoint's kind or config echo does not match what the caller expects."""


class TrainingDivergedError(FigsepError):
    """Training produced a non-finite loss."""

    def __init__(self, step, loss_value, message=None):
        self.step = step
        self.loss_value = loss_value
        super().__init__(
            message or f"non-finite loss {loss_value!r} at step {step}"
        )
