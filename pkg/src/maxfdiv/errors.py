"""Exception types shared across the package."""


class MaxFDivError(Exception):
    """Base class for all package-specific errors."""


class NonHermitianInput(MaxFDivError):
    """Input matrix is not Hermitian within tolerance."""


class InvalidDensity(MaxFDivError):
    """Matrix fails the density-matrix invariants (PSD, unit trace)."""


class DimensionMismatch(MaxFDivError):
    """Operands have incompatible dimensions."""


class LengthMismatch(MaxFDivError):
    """Vectors have different lengths."""


class InvalidRank(MaxFDivError):
    """Requested rank is outside [1, n]."""


class DomainViolation(MaxFDivError):
    """A spectrum point lies outside the declared domain of a scalar function."""


class SingularSigma(MaxFDivError):
    """Reference state is rank-deficient; use the regularized evaluation."""


class UnknownFunction(MaxFDivError):
    """Function name is not in the catalog."""


class AlphaOutOfOperatorConvexRange(MaxFDivError):
    """Power exponent outside (-1,0) | (0,1) | (1,2]."""


class MeasureUnavailable(MaxFDivError):
    """Function record carries no representation measure."""


class QuadratureNotConverged(MaxFDivError):
    """Numerical integral failed to reach the requested tolerance."""


class DimensionTooLargeForBruteForce(MaxFDivError):
    """Factorial guard for exhaustive permutation sweeps."""
