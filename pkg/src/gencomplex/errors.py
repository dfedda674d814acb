"""Exception types shared across the package.

The CLI maps these onto exit codes: ``ConfigError`` -> 2, ``BudgetExceeded`` -> 3.
"""


class InvalidInput(ValueError):
    """A word, letter or parameter is outside the allowed range."""


class ConfigError(ValueError):
    """A configuration file or CLI argument could not be interpreted."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetExceeded(RuntimeError):
    """An enumeration or graph exploration would exceed its size budget.

    ``estimate`` is the size that was requested (or a lower bound on it);
    ``attained`` is whatever partial progress was made, e.g. a radius.
    """

    def __init__(self, message: str, estimate: int | None = None, attained: int | None = None):
        self.estimate = estimate
        self.attained = attained
        super().__init__(message)


class Refused(RuntimeError):
    """An operation's precondition does not hold (e.g. infinite index, short radius)."""


class SoundnessViolation(AssertionError):
    """Two sound solvers produced contradictory definite answers."""
