"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes, so raising the right class
matters more than the message text.
"""


class ConcordanceError(Exception):
    """Base class for all package-specific errors."""


class InputDataError(ConcordanceError):
    """Malformed or structurally inconsistent input data."""


class CapacityError(ConcordanceError):
    """A requested computation exceeds a configured size bound."""


class DegenerateStatisticError(ConcordanceError):
    """The statistic is undefined for the given group structure."""


class ConfigurationError(ConcordanceError):
    """Invalid option values (sample counts, seeds, flags)."""
