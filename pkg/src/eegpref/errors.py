"""Exception types shared across the package."""


class PipelineError(Exception):
    """Base class for every error this package raises on purpose."""


class EmptyDatasetError(PipelineError):
    """An ingestion source yielded zero signals."""


class ManifestError(PipelineError):
    """A manifest or signal file could not be parsed.

    The message always carries the file path and, when known, the
    offending line or row number.
    """


class DuplicateIdError(PipelineError):
    """Two signals in one dataset share an id."""


class NonFiniteError(PipelineError, ValueError):
    """NaN or infinity showed up where only finite values are allowed."""


class TooShortError(PipelineError, ValueError):
    """A sequence is shorter than the operation's minimum length."""


class BadParameterError(PipelineError, ValueError):
    """A configuration value or argument is outside its allowed range."""


class ShapeError(PipelineError, ValueError):
    """Array or sequence shapes do not line up."""


class MissingClassError(PipelineError):
    """An operation needs signals from both classes (or more per class)."""


class EmptyTrainSetError(PipelineError):
    """Training was asked to run on an empty training set."""


class DivergenceError(PipelineError):
    """Training produced a non-finite loss."""


class SolverError(PipelineError):
    """The banded solver produced a non-finite result; indicates a bug."""


class VersionMismatchError(PipelineError):
    """A model file declares a format version this code does not read."""


class CorruptModelError(PipelineError):
    """A model file is truncated or structurally invalid."""
