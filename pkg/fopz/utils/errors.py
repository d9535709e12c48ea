"""Exception hierarchy shared by every fopz module.

All errors derive from ``FopzError`` (itself a ``ValueError``) so callers can
catch input problems with a single except clause; the CLI maps them to exit
code 2.
"""

from typing import List, Optional


class FopzError(ValueError):
    """Base class for all user-facing errors."""


class FormulaSyntaxError(FopzError):
    """Formula text does not match the grammar."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnboundVariableError(FopzError):
    """An indexed variable is used without being quantified."""


class DuplicateVariableError(FopzError):
    """The same name is quantified twice."""


class DimensionError(FopzError):
    """Coordinate index or vector length does not match a declared dimension."""


class AssignmentError(FopzError):
    """Free-variable assignment is missing or has extra keys."""


class FormulaTooLargeError(FopzError):
    """DNF expansion exceeded the configured disjunct cap."""


class DatasetError(FopzError):
    """Malformed or inconsistent dataset."""


class CapExceededError(FopzError):
    """An enumeration exceeded its configured size cap."""


class PrefixError(FopzError):
    """Operation is not defined for the quantifier prefix of the instance."""


class EngineInapplicableError(FopzError):
    """Requested engine cannot decide the given instance."""

    def __init__(self, message: str, applicable: Optional[List[str]] = None):
        super().__init__(message)
        self.applicable = list(applicable or [])


class ReductionError(FopzError):
    """Reduction parameters violate their invariants."""


class GeometryError(FopzError):
    """Invalid box, rectangle or cube input."""


class KSumFormatError(FopzError):
    """Malformed k-SUM instance text."""


class ConsistencyError(FopzError):
    """Two routes to the same answer disagree."""
