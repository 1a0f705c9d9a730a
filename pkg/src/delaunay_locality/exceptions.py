"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`LocalityError`, so callers (and the CLI) can map failures to exit
codes without catching unrelated bugs.
"""


class LocalityError(Exception):
    """Base class for all package errors."""


class InvalidInputError(LocalityError, ValueError):
    """Malformed input: wrong shapes, non-finite values, bad parameters."""


class DegenerateSimplexError(LocalityError):
    """A vertex set that should span a d-simplex is affinely dependent."""


class DegenerateInputError(LocalityError):
    """The dictionary's affine hull is not full dimensional."""


class NotInteriorError(LocalityError):
    """A query that must lie strictly inside a simplex does not."""


class NotApplicableError(LocalityError):
    """A bound's hypotheses fail for the given query.

    ``finding`` carries what the point-location oracle reported, e.g. the
    list of simplices containing the query (empty when it is outside the
    hull).
    """

    def __init__(self, message, finding=None):
        super().__init__(message)
        self.finding = finding


class ResourceLimitError(LocalityError):
    """A desk-scale guard (subset enumeration budget) would be exceeded."""


class SingularKKTError(LocalityError):
    """The assembled KKT matrix could not be factorized."""
