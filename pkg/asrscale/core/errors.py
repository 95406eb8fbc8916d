from typing import Optional


class ConfigurationError(ValueError):
    """
    A configuration document, spec value, or module reference is invalid
    """


class UndefinedMetricError(ValueError):
    """
    A metric cannot be computed for the given input (e.g. zero reference length)
    """


class FitError(ValueError):
    """
    Base class for scaling-fit failures
    """


class UnattainableTargetError(FitError):
    pass


class NonInvertibleFitError(FitError):
    pass


class DegenerateFitError(FitError):
    pass


class ParseError(ValueError):
    """
    Malformed CSV/TSV input; carries the 1-based line number when known
    """

    def __init__(self, message: str, line: Optional[int] = None):
        self.line: Optional[int] = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StoreError(RuntimeError):
    pass


class StoreConflictError(StoreError):
    pass


class StoreCorruptError(StoreError):
    def __init__(self, message: str, offset: int):
        self.offset: int = offset
        super().__init__(f"byte offset {offset}: {message}")
