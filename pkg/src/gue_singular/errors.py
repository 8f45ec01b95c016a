"""Exception types raised across the package."""


class DomainError(ValueError):
    """A parameter lies outside the domain where an operation is defined."""


class StructuralError(ValueError):
    """Input does not have the required matrix structure (e.g. not Hermitian)."""


class DegenerateInputError(ValueError):
    """Input values coincide or vanish where distinct positive values are needed."""


class CapacityError(ValueError):
    """Request exceeds a deliberate size cap (conditioning or combinatorial)."""
