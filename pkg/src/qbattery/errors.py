"""Exception types raised by qbattery."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ConvergenceError(ArithmeticError):
    """The tridiagonal eigensolver failed to converge.

    Attributes
    ----------
    index : int
        Eigenvalue index at which the iteration cap was hit.
    iterations : int
        Number of QL sweeps spent on that eigenvalue.
    """

    def __init__(self, index, iterations):
        self.index = index
        self.iterations = iterations
        super().__init__(
            f"QL iteration did not converge for eigenvalue {index} "
            f"after {iterations} iterations"
        )
