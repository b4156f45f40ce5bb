"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or invalid input data."""


class UnsupportedError(Exception):
    """The polygon class has no construction (strip, whole plane, ...)."""


class DomainError(ValueError):
    """Parameters outside their admissible range."""


class DegenerateMapError(ArithmeticError):
    """The momentum map has non-positive oriented Jacobian at a sample."""


class StepError(ValueError):
    """A finite-difference stencil leaves the admissible region."""


class ConvergenceError(ArithmeticError):
    """An iteration failed to converge; `best` holds the best iterate."""

    def __init__(self, msg, best=None, residual=None):
        super().__init__(msg)
        self.best = best
        self.residual = residual
