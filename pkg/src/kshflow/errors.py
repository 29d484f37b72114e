"""Exception types raised by kshflow."""


class KshError(Exception):
    """Base class for all kshflow errors."""


class NonHyperbolic(KshError, ValueError):
    """The quadratic Hamiltonian has a non-negative Hessian determinant."""


class ZeroH11(KshError, ValueError):
    """The reduction to diagonal form needs ``h11 != 0``."""


class OutOfRange(KshError, ValueError):
    """A time argument lies outside the admissible interval."""


class SingularTime(KshError, ArithmeticError):
    """The Gaussian ansatz of the heat semigroup degenerates at this time."""


class DivergentIntegral(KshError, ArithmeticError):
    """A Gaussian pairing does not converge (e.g. anti-Kahler sections)."""


class ToleranceNotMet(KshError, ArithmeticError):
    """Quadrature refinement did not reach the requested tolerance."""


class BlowUp(KshError, ArithmeticError):
    """The width ODE left its bounded region before reaching the final time."""
