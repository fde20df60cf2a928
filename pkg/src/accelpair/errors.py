"""Exception types raised by the numeric layers."""


class AccelPairError(Exception):
    """Base class for all package-specific errors."""


class NonConvergence(AccelPairError):
    """A series or expansion failed to reach the requested tolerance."""


class InvalidIndex(AccelPairError):
    """Hypergeometric index is a nonpositive integer (kernel undefined)."""


class PoleArgument(AccelPairError):
    """Polygamma argument sits on a pole (nonpositive integer)."""


class DomainError(AccelPairError, ValueError):
    """Argument outside the mathematical domain of the operation."""


class SingularPoint(AccelPairError):
    """Kernel denominator vanishes exactly at the requested point."""


class SingularKernel(AccelPairError):
    """Requested regulator scheme leaves a non-integrable kernel."""


class StepUnderflow(AccelPairError):
    """Finite-difference extrapolation failed to converge."""


class QuadratureNonConvergence(AccelPairError):
    """Adaptive quadrature exhausted its budget; carries the achieved error."""

    def __init__(self, message, achieved_error=None):
        super().__init__(message)
        self.achieved_error = achieved_error


class NonPhysicalState(AccelPairError):
    """Covariance data violates the Heisenberg bound."""


class ComplexSpectrum(AccelPairError):
    """Symplectic spectrum discriminant is significantly negative."""


class SingularCovariance(AccelPairError):
    """Covariance matrix too close to singular for the Gaussian inversion."""


class SingularGTilde(AccelPairError):
    """Quadratic-form matrix of the Gaussian state is not invertible."""


class OverdampedUnsupported(AccelPairError):
    """Damped-oscillator propagation requested in the overdamped regime."""


class UnknownPreset(AccelPairError, KeyError):
    """Figure preset name not recognized."""
