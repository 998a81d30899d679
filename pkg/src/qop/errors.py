"""Exception hierarchy shared by every qop module."""


class QopError(Exception):
    """Base class for all library errors."""


class StructuralError(QopError):
    """Mismatched grids, too-coarse grids, wrong array shapes."""


class InputError(QopError):
    """Caller supplied a value outside an operation's contract."""


class NumericalError(QopError):
    """An iterative kernel failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class UnsupportedCase(QopError):
    """The request lies outside the analysed catalog; we refuse rather than guess."""


class PreconditionError(QopError):
    """An operation's precondition (e.g. deficiency indices) is not met."""


class NotSelfAdjointError(QopError):
    """Refusal to produce a spectrum for an operator that is not an observable."""

    def __init__(self, message, classification):
        super().__init__(message)
        self.classification = classification


class DomainViolation(QopError):
    """A state lies outside the domain an operation requires."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConfigError(QopError):
    """Scenario file could not be parsed; carries the offending line if known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
