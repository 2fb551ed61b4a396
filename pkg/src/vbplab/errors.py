"""Exception hierarchy.  ``VBPError`` catches everything raised on purpose."""


class VBPError(Exception):
    pass


class InputError(VBPError, ValueError):
    """Malformed instance, bad item index, infeasible configuration."""


class ParameterError(VBPError, ValueError):
    """A numeric parameter (delta, eps, gamma, ...) is out of range."""


class CapacityError(VBPError):
    """Problem too large for an exhaustive routine."""


class UnsupportedDimensionError(VBPError):
    pass


class ClassError(VBPError, ValueError):
    """Configuration does not belong to the class an operation requires."""


class SolverError(VBPError, RuntimeError):
    """An LP / pricing routine failed numerically or hit its iteration cap."""


class MembershipError(VBPError):
    """A point was required to lie in the matching polytope but does not."""


class EmptyDistributionError(VBPError, ValueError):
    pass
