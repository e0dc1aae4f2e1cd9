"""Exception hierarchy shared across the package."""


class MdepError(Exception):
    """Base class for all package errors."""


class ConfigError(MdepError, ValueError):
    """Invalid configuration or mismatched inputs."""


class DimensionError(MdepError, ValueError):
    """Sample size or dimension incompatible with the requested operation."""


class ParseError(MdepError, ValueError):
    """Malformed input file.

    Parameters
    ----------
    message : str
    row : int, optional
        1-based line number in the file.
    cell : str, optional
        Offending cell text.
    """

    def __init__(self, message, row=None, cell=None):
        super().__init__(message)
        self.row = row
        self.cell = cell


class DomainError(MdepError, ValueError):
    """Argument outside the domain of a numeric routine."""


class NotPositiveDefiniteError(MdepError, ValueError):
    """Cholesky factorization failed.

    ``minor`` is the 1-based order of the first leading minor that is not
    positive.
    """

    def __init__(self, minor):
        super().__init__(f"matrix is not positive definite (leading minor {minor})")
        self.minor = minor


class SingularSystemError(MdepError, ArithmeticError):
    """The debiasing system is numerically singular."""


class EmptyIndexSetError(MdepError, ValueError):
    """A gapped index set is empty: n is too small for this M."""


class DegenerateVarianceError(MdepError, ArithmeticError):
    """The variance estimate of a test statistic is not positive."""
