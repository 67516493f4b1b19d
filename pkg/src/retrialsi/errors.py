"""Exception hierarchy shared by all retrialsi modules."""


class RetrialSIError(Exception):
    """Base class for retrialsi errors."""


class DomainError(RetrialSIError, ValueError):
    """An argument lies outside its mathematical domain (state, time, order, ...)."""


class ConfigError(RetrialSIError, ValueError):
    """A model or scenario configuration is invalid."""


class GraphFormatError(ConfigError):
    """An edge-list document could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ModelError(RetrialSIError, ValueError):
    """The model itself is ill-posed (negative rate, reducible chain, ...)."""


class NumericalError(RetrialSIError, RuntimeError):
    """A numerical routine failed to meet its contract."""


class AccuracyError(NumericalError):
    """An inverse-transform result fell outside its accuracy band."""

    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state
