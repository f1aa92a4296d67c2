"""Exception types shared across the solvers."""


class FeasibilityError(ValueError):
    """The target is too far from the product for a guaranteed factorization.

    Carries the measured defect (the L1 distance between the target and the
    actual product) and the bound the defect was required to stay strictly
    below.
    """

    def __init__(self, defect: float, bound: float, context: str = ""):
        self.defect = defect
        self.bound = bound
        self.context = context
        where = f" in {context}" if context else ""
        super().__init__(
            f"infeasible{where}: defect {defect!r} is not strictly below the "
            f"required bound {bound!r}"
        )
