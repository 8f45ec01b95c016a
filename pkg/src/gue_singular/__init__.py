"""Random-matrix laboratory for GUE singular values and their anti-GUE decomposition."""

__version__ = "0.1.0"

from .ensembles import EnsembleSpec, Family, Spectrum, make_rng  # noqa: E402
from .errors import CapacityError, DegenerateInputError, DomainError, StructuralError  # noqa: E402

__all__ = [
    "CapacityError",
    "DegenerateInputError",
    "DomainError",
    "EnsembleSpec",
    "Family",
    "Spectrum",
    "StructuralError",
    "make_rng",
]
