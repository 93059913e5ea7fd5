"""Exception hierarchy shared by all modules."""


class DirwellError(Exception):
    """Base class. ``code`` is a short stable identifier used by the CLI."""

    code = "E_GENERIC"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code


class InputError(DirwellError, ValueError):
    code = "E_INPUT"


class ProblemError(DirwellError, ValueError):
    """Problem document failed validation.

    Codes: ``E_SCHEMA``, ``E_GENERATOR``, ``E_ANCHOR``, ``E_BUILTIN``,
    ``E_EXPR``, ``E_BOX``.
    """

    code = "E_SCHEMA"


class EvaluationError(DirwellError, ArithmeticError):
    code = "E_EVAL"


class GradientUndefinedError(EvaluationError):
    code = "E_GRADIENT"


class DegenerateRegionError(DirwellError):
    code = "E_DEGENERATE"


class NoFiniteValueError(DirwellError):
    code = "E_NO_FINITE"


class PreconditionError(DirwellError):
    code = "E_PRECONDITION"


class NonConvergenceError(DirwellError):
    code = "E_NONCONVERGENCE"

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class UnsupportedConfigurationError(DirwellError):
    code = "E_UNSUPPORTED"
