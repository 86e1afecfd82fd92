"""Exception types shared across the package.

Invalid arguments raise plain ValueError (or a subclass below when the
condition has a dedicated recovery path). Failures of numeric routines on
valid input raise NumericFailureError so callers can distinguish "you gave
me garbage" from "the computation fell over".
"""


class UnreconstructableChannelError(ValueError):
    """A channel has no observed samples, so nothing can anchor a fill."""


class UndefinedMetricError(ValueError):
    """A metric's denominator is zero, so the ratio does not exist."""


class NumericFailureError(RuntimeError):
    """A numeric routine failed on structurally valid input."""


class ModelFileError(RuntimeError):
    """A model file cannot be loaded."""


class CorruptModelFileError(ModelFileError):
    """The file is truncated or its framing does not parse."""


class ModelVersionError(ModelFileError):
    """The file's format version is not supported by this build."""


class ModelShapeError(ModelFileError):
    """Declared array shapes disagree with the payload or each other."""
