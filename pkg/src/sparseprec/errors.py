"""Exception types raised by the estimation toolkit."""


class SparsePrecError(Exception):
    """Base class for all errors raised by :mod:`sparseprec`."""


class NumericalError(SparsePrecError):
    """Numerical breakdown; the CLI maps these to exit code 2."""


class NotPositiveDefinite(NumericalError):
    """Cholesky met a non-positive pivot."""

    def __init__(self, pivot_index, pivot_value):
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value
        super().__init__(
            f"matrix is not positive definite (pivot {pivot_index} = {pivot_value:.3e})"
        )


class RankDeficient(NumericalError):
    """Restricted Gram matrix is singular even after the ridge retry."""


class ZeroGradient(NumericalError):
    """The initial correlation vector is identically zero."""


class NoCrossing(NumericalError):
    """No inactive coordinate of the dual ever reaches the unit bound."""


class BoundDegenerate(NumericalError):
    """A bound has a non-positive denominator (p * lambda >= 1)."""


class DegenerateDraw(NumericalError):
    """A random graph draw produced a matrix with a single eigenvalue."""


class TooFewSamples(SparsePrecError, ValueError):
    pass


class DimensionMismatch(SparsePrecError, ValueError):
    pass
