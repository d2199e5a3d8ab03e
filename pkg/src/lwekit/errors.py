"""Exception types shared across the package.

Probabilistic aborts of the reductions are *not* exceptions: the affected
functions return None and the caller counts the outcome.
"""


class ParameterError(ValueError):
    """A precondition on numerical parameters is violated."""


class CoprimalityError(ParameterError):
    """A gcd that must be coprime with the modulus is not."""


class NonInvertibleError(ParameterError):
    """A matrix expected to be invertible modulo q is singular."""


class HintSetError(ParameterError):
    """A hint vector lies outside the configured hint set."""


class NotPsdError(ParameterError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class ChainingError(ValueError):
    """Adjacent pipeline stages have incompatible interfaces."""


class RefusalError(ValueError):
    """Requested exhaustive computation exceeds the configured feasibility cap."""


class IterationCapError(RuntimeError):
    """A rejection loop hit its iteration cap (misconfigured parameters)."""


class ConfigError(ValueError):
    """A CLI or pipeline configuration document is malformed."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if field is not None:
            prefix += f"field '{field}': "
        super().__init__(prefix + message)
