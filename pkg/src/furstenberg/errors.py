"""Exception types shared across the package."""


class SpecError(ValueError):
    """Invalid model description (shape, symmetry, parameter range)."""


class NumericalError(RuntimeError):
    """A numerical kernel failed (non-convergence, overflow, rank collapse)."""


class OutsideLogNeighborhood(ValueError):
    """Matrix is too far from the identity for the series logarithm."""


class CriticalLengthError(ValueError):
    """Cell length is not strictly below the critical length."""

    def __init__(self, ell, ell_c):
        self.ell = ell
        self.ell_c = ell_c
        super().__init__(f"ell >= ell_C: ell={ell!r}, ell_C={ell_c!r}")


class ClosureError(NumericalError):
    """Lie closure iteration did not stabilize within its pass budget."""
