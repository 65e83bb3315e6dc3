"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`EEGConnError`, so callers can catch one type at the boundary.
"""


class EEGConnError(Exception):
    """Base class for package errors."""


class ConfigurationError(EEGConnError, ValueError):
    """Invalid parameters: filter edges, bands, thresholds, config files."""


class InputError(EEGConnError, ValueError):
    """Input data does not satisfy an operation's preconditions."""


class DegeneratePhaseError(InputError):
    """Instantaneous phase is undefined (all-zero signal)."""


class EstimationError(EEGConnError, ArithmeticError):
    """A spectral estimate is degenerate (too few segments, zero power)."""


class LabelParseError(InputError):
    """Electrode label does not follow the 10-5 naming grammar."""

    def __init__(self, label):
        self.label = label
        super().__init__(f"cannot parse electrode label {label!r}")


class ClassificationError(InputError):
    """One or more electrode prefixes have no region assignment."""

    def __init__(self, prefixes, labels=()):
        self.prefixes = tuple(prefixes)
        self.labels = tuple(labels)
        detail = ", ".join(self.prefixes)
        msg = f"unknown electrode prefix(es): {detail}"
        if self.labels:
            msg += f" (labels: {', '.join(self.labels)})"
        super().__init__(msg)


class RecordingFormatError(InputError):
    """Recording file cannot be decoded."""


class TruncatedPayloadError(RecordingFormatError):
    def __init__(self, path, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"{path}: truncated payload, expected {expected} bytes, got {actual}"
        )


class HeaderMismatchError(RecordingFormatError):
    """Header fields disagree with the payload or with each other."""


class DuplicateLabelError(InputError):
    def __init__(self, labels):
        self.labels = tuple(labels)
        super().__init__(f"duplicate channel label(s): {', '.join(self.labels)}")


class PipelineError(EEGConnError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
