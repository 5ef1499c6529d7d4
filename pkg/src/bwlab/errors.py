"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class FeasibilityError(ValueError):
    """A derived parameter set violates the admissible hysteretic class.

    Carries the list of violated invariants in ``violations``.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class ConfigError(ValueError):
    """A configuration file or CLI argument is malformed or inconsistent."""


class ParseError(ConfigError):
    """An input file could not be parsed; ``line`` is the 1-based offender."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class NumericalError(RuntimeError):
    """Integration or filtering failed numerically.

    ``t`` records the simulation time at which the failure was detected,
    when that is meaningful.
    """

    def __init__(self, message, t=None):
        super().__init__(message if t is None else f"{message} (t = {t:.6g} s)")
        self.t = t
