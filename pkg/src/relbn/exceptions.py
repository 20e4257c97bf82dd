"""Exception hierarchy.

Every error raised on bad input derives from :class:`RelbnError`, which the
CLI maps to exit status 1.
"""


class RelbnError(Exception):
    """Base class for domain errors."""


class SchemaError(RelbnError, ValueError):
    """Unknown attribute, out-of-domain value or malformed scheme."""


class UndefinedFrequencyError(RelbnError, ZeroDivisionError):
    """Frequency requested over an empty selection."""


class UnsupportedDependencyError(RelbnError, TypeError):
    pass


class CoverageError(RelbnError):
    """No relation contains the attributes of a dependency."""


class CyclicDependencyError(RelbnError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("dependencies form a cycle: " + " -> ".join(map(str, self.cycle)))


class DecompositionError(RelbnError):
    pass


class ConfigurationError(RelbnError, ValueError):
    pass


class IncompatibleEvidenceError(RelbnError):
    """Evidence puts mass on a configuration the prior rules out."""


class ConvergenceError(RelbnError):
    pass


class ScopeError(RelbnError, KeyError):
    """Attributes not covered by a potential or by any clique."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class SizeLimitError(RelbnError):
    pass


class CapacityError(RelbnError):
    pass


class NoDataError(RelbnError):
    pass
