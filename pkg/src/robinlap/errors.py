"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class RobinLapError(Exception):
    """Base class for all library errors."""


class ValidationError(RobinLapError, ValueError):
    """Invalid input to a constructor or operation."""


class BesselOverflowError(RobinLapError, OverflowError):
    """J_nu(z) is not representable in double precision; use log_bessel_j."""


class PoleError(RobinLapError, ZeroDivisionError):
    """A denominator vanishes: lambda is a Neumann eigenvalue for the mode,
    or z is a zero of J_nu'."""

    def __init__(self, message, *, nu=None, z=None, ell=None, lam=None):
        super().__init__(message)
        self.nu = nu
        self.z = z
        self.ell = ell
        self.lam = lam


class EigenvalueHitError(RobinLapError, ArithmeticError):
    """theta - M(lambda) is singular: lambda is an eigenvalue of the realization."""

    def __init__(self, message, *, ell=None, lam=None):
        super().__init__(message)
        self.ell = ell
        self.lam = lam


class QuadratureError(RobinLapError, ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance."""


class BoundaryOperatorError(ValidationError):
    """A boundary parameter does not satisfy its declared hypotheses."""


class SymmetryClassError(BoundaryOperatorError):
    """Representation does not match the claimed symmetry class."""


class EssentialSpectrumGapError(BoundaryOperatorError):
    """0 is (numerically) a limit point of the diagonal rule."""


class InadmissibleSpectralPoint(RobinLapError, ValueError):
    """lambda lies outside the half-plane where the resolvent formula is guaranteed."""


class SolveError(RobinLapError, ArithmeticError):
    """A finite-difference system is singular (lambda near a discrete eigenvalue)."""
