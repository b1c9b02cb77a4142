"""Exception types raised by the library.

Only the command line layer turns these into exit codes.
"""


class UncertaintyForestError(Exception):
    """Base class for every error raised on purpose by the package."""


class DatasetError(UncertaintyForestError, ValueError):
    """Invalid tabular data: non-numeric cells, non-finite values, bad labels, too few rows."""


class SchemaMismatchError(DatasetError):
    """Data and model disagree on the number of features or classes."""


class UnsupportedTaskError(UncertaintyForestError, ValueError):
    """The requested measure is not defined for this task (e.g. relative likelihood with K != 2)."""


class ModelFormatError(UncertaintyForestError, ValueError):
    """A model document could not be read back."""
