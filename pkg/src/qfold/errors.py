"""Exception types shared across the package."""


class QfoldError(Exception):
    """Base class for all errors raised by this package."""


class RingMismatchError(QfoldError):
    """Operands live over different coefficient rings."""


class DatumError(QfoldError):
    """A matrix fails the Cartan-datum axioms."""


class AutomorphismError(QfoldError):
    """A permutation is not a valid admissible diagram automorphism."""


class NotFiniteTypeError(QfoldError):
    """Root-system enumeration did not terminate within the finite-type bound."""


class NotReducedError(QfoldError):
    """A word is not a reduced expression in the Weyl group."""


class BraidImageError(QfoldError):
    """A braid-operator image has a nonzero residue outside the negative part."""


class ExpansionError(QfoldError):
    """A basis expansion failed (inconsistent coordinates or bad denominator)."""


class TriangularityError(QfoldError):
    """A matrix expected to be unitriangular is not."""


class SkewError(QfoldError):
    """skew_solve was applied to a scalar that is not bar-antisymmetric."""


class ProjectionError(QfoldError):
    """pi_project preconditions violated (not sigma-fixed, or bad weight)."""
