class DiterError(Exception):
    pass


class EdgeListError(DiterError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyInputError(EdgeListError):
    def __init__(self):
        super().__init__("empty input: no edges and no dimension header")


class CompletionError(DiterError, ValueError):
    pass


class ConvergenceError(DiterError):
    """Raised when a solver exhausts its budget; ``report`` holds the last state."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DivergenceError(ConvergenceError):
    pass


class UndefinedMethodError(DiterError, ValueError):
    """A method requested outside its domain, e.g. DI at d = 1."""


class SingularMatrixError(DiterError, ArithmeticError):
    pass
