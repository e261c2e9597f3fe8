"""Shared exception types."""


class EpicError(Exception):
    """Base class for errors raised by this package."""


class AutomatonSizeError(EpicError):
    """A constructed automaton exceeded the configured state cap."""


class LoadError(EpicError):
    """A workspace file failed to parse or referenced a missing name."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class InputContradictionError(EpicError):
    """Word problem streams produced both a membership and a non-membership
    certificate for the same word, which means the inputs were invalid."""
