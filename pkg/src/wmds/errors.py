"""Exception types shared across the package.

Each class carries a short machine-readable ``kind`` so that the command line
front end can map failures to exit codes without string matching.
"""


class WMDSError(Exception):
    kind = "error"


class ConstructionError(WMDSError, ValueError):
    """Invalid Cartan label or malformed root datum."""

    kind = "construction"


class EnumerationLimitError(WMDSError):
    """A group or tuple enumeration would exceed the configured cap."""

    kind = "cap"

    def __init__(self, needed, cap):
        self.needed = needed
        self.cap = cap
        super().__init__(f"enumeration of {needed} items exceeds cap {cap} (set WMDS_CAP to raise it)")


class NonReducedWordError(WMDSError, ValueError):
    kind = "non-reduced"


class UnsupportedNodeError(WMDSError, ValueError):
    """Requested node is long, or not admissible for the requested construction."""

    kind = "node"


class PartitionUndefinedError(WMDSError, ValueError):
    kind = "partition"


class PoleError(WMDSError, ZeroDivisionError):
    """A denominator factor vanishes identically, or a pole has the wrong order."""

    kind = "pole"


class NotExpandableError(WMDSError, ValueError):
    kind = "not-expandable"


class EvaluationError(WMDSError, ZeroDivisionError):
    kind = "evaluation"


class InconsistentError(WMDSError, ArithmeticError):
    """An internal consistency check failed (nonzero remainder, contradictory relation, ...)."""

    kind = "inconsistent"


class UnsupportedFieldError(WMDSError, ValueError):
    kind = "field"
