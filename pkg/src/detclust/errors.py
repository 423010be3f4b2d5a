"""Exception types shared across the numerical layers."""


class NotPositiveDefinite(Exception):
    """Cholesky factorization hit a non-positive pivot.

    Carries the index of the failing pivot so callers can report which
    point made the cluster matrix degenerate.
    """

    def __init__(self, pivot_index, pivot_value):
        self.pivot_index = int(pivot_index)
        self.pivot_value = float(pivot_value)
        super().__init__(
            f"matrix is not positive definite: pivot {self.pivot_index} "
            f"is {self.pivot_value:.6g}"
        )


class NumericalDegeneracy(Exception):
    """An incremental inverse update produced a non-usable complement.

    Raised instead of silently propagating a zero or negative Schur
    complement; callers typically respond by rebuilding the affected
    cache from scratch.
    """

    def __init__(self, value, detail=""):
        self.value = float(value)
        msg = f"degenerate update: complement is {self.value:.6g}"
        if detail:
            msg = f"{msg} ({detail})"
        super().__init__(msg)
