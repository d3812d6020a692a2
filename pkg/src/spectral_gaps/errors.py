"""Exception hierarchy shared by every module of the package."""


class SpectralGapsError(Exception):
    """Base class for all package errors."""


class InvalidDomain(SpectralGapsError, ValueError):
    pass


class EmptyGrid(SpectralGapsError):
    pass


class WrongDomainKind(SpectralGapsError, TypeError):
    pass


class UnsupportedShape(SpectralGapsError, ValueError):
    pass


class NoConvergence(SpectralGapsError):
    """An iterative method stopped before reaching its tolerance.

    The final (relative) residual and the iteration budget are kept so
    callers can report them.
    """

    def __init__(self, max_iter, residual, what="iteration"):
        self.max_iter = max_iter
        self.residual = residual
        super().__init__(
            f"{what} did not converge in {max_iter} steps "
            f"(final residual {residual:.3e})"
        )


class KTooLarge(SpectralGapsError, ValueError):
    pass


class UnsupportedOrder(SpectralGapsError, ValueError):
    pass


class RangeError(SpectralGapsError, ValueError):
    pass


class TooFewEigenvalues(SpectralGapsError, ValueError):
    pass


class TooFewEigenpairs(TooFewEigenvalues):
    pass


class Infeasible(SpectralGapsError, ValueError):
    pass


class SizeMismatch(SpectralGapsError, ValueError):
    pass


class IndexOrder(SpectralGapsError, ValueError):
    pass


class NotUnitGradient(SpectralGapsError, ValueError):
    pass


class SpectrumFormatError(SpectralGapsError, ValueError):
    """A spectrum or eigenvector file could not be parsed."""
