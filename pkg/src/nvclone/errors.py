"""Exception hierarchy shared by every module."""


class NvCloneError(Exception):
    """Base class for all errors raised by nvclone."""


class ConfigError(NvCloneError, ValueError):
    """Invalid parameters or configuration."""


class NumericalError(NvCloneError):
    """A numerical routine could not produce a trustworthy result."""


class DegenerateLevels(NumericalError):
    pass


class InvalidDensity(NvCloneError, ValueError):
    pass


class UnknownPreset(NvCloneError, KeyError):
    pass


class IntegrationError(NumericalError):
    pass


class DegenerateCalibration(NumericalError):
    pass


class NoOscillation(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


class EmptySubspace(NumericalError):
    pass


class DegenerateInput(NumericalError, ValueError):
    pass


class SequenceError(NvCloneError, ValueError):
    """Base for pulse-sequence parse failures; carries a source position."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        loc = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(loc + message)


class SequenceSyntaxError(SequenceError):
    def __init__(self, message, line=None, column=None, expected=()):
        self.expected = tuple(expected)
        if self.expected:
            message = f"{message} (expected {', '.join(self.expected)})"
        super().__init__(message, line, column)


class SemanticError(SequenceError):
    pass


class InvalidState(NvCloneError, ValueError):
    pass
