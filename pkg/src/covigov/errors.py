"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`CovigovError`.  The ``exit_code`` attribute is what the command line
front end returns when the error escapes a run.
"""


class CovigovError(Exception):
    exit_code = 1


class ConfigError(CovigovError):
    exit_code = 2


class ParseError(ConfigError):
    """The configuration document is not well formed."""


class ValidationError(ConfigError, ValueError):
    """A value violates a documented constraint."""


class InvalidConfig(ValidationError):
    """Inconsistent simulation set-up (node counts, seeding totals...)."""


class NumericError(CovigovError):
    exit_code = 3


class ZeroDenominator(NumericError, ZeroDivisionError):
    """A closed-form expression is undefined because a factor vanishes."""

    def __init__(self, factor, message=None):
        self.factor = factor
        super().__init__(message or f"denominator factor {factor} is zero")


class InvalidStep(NumericError, ValueError):
    pass


class OutOfRange(NumericError, ValueError):
    pass


class MalformedPlan(NumericError, ValueError):
    pass


class NoConvergence(NumericError):
    pass


class ArtifactIOError(CovigovError, OSError):
    exit_code = 4

    def __init__(self, path, reason="", action="write"):
        self.path = str(path)
        msg = f"cannot {action} {self.path}"
        super().__init__(f"{msg}: {reason}" if reason else msg)
