"""Exception types shared across the package."""


class FcqstError(ValueError):
    """Base class for all contract violations raised by this package."""


class InvalidSizeError(FcqstError):
    """Qubit count too small for the requested construction."""


class SizeLimitError(FcqstError):
    """Qubit count exceeds a hard limit (full-space builds are exponential)."""


class SymmetryError(FcqstError):
    """Model is not permutation symmetric over the intermediate qubits."""


class BasisError(FcqstError):
    """Operation not defined for the given sector basis."""


class HermiticityError(FcqstError):
    """Matrix expected to be Hermitian is not, beyond tolerance."""


class UnitarityError(FcqstError):
    """Matrix expected to be unitary is not, beyond tolerance."""


class UnsupportedCaseError(FcqstError):
    """Requested brachistochrone case has no solution of the requested kind."""


class GridMismatchError(FcqstError):
    """Multiplier trajectory is not aligned with the schedule grid."""


class BoundViolationError(FcqstError):
    """A control parameter violates its stated amplitude bound."""
