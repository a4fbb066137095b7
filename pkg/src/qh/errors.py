"""Exception hierarchy.  The CLI maps these onto exit codes."""

from .numerics import DomainError, NumericalError


class QhError(Exception):
    pass


class ConfigError(QhError, ValueError):
    """Malformed or out-of-range user input."""


class FamilyInapplicable(QhError, ValueError):
    """The input does not belong to the requested solution family."""


class NoSolution(FamilyInapplicable):
    """Closed form exists only outside its domain (e.g. arctanh argument)."""


class DegenerateFamily(FamilyInapplicable):
    """A family denominator vanishes."""


class ComplexCounterpart(FamilyInapplicable):
    """A square-root radicand is negative, so the counterpart is not real."""


__all__ = [
    "QhError", "ConfigError", "FamilyInapplicable", "NoSolution", "DegenerateFamily",
    "ComplexCounterpart", "DomainError", "NumericalError",
]
