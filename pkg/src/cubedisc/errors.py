"""Exception hierarchy shared by the toolkit."""


class CubeDiscError(Exception):
    pass


class DomainError(CubeDiscError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeViolation(CubeDiscError, ValueError):
    """A (n, m) pair fails one of the strict inequalities sqrt(n) < m < 3^k < 3 sqrt(n)."""

    def __init__(self, n: int, m: int, inequality: str):
        self.n = n
        self.m = m
        self.inequality = inequality
        super().__init__(f"n={n}, m={m}: {inequality} fails")


class ClassificationError(CubeDiscError):
    pass


class ExhaustionError(CubeDiscError):
    """No collision 1 <= a < b <= n exists modulo m^2."""

    def __init__(self, n: int, m: int, detail: str = ""):
        self.n = n
        self.m = m
        msg = f"no collision for n={n}, m={m}"
        super().__init__(msg + (f" ({detail})" if detail else ""))


class BudgetError(CubeDiscError):
    """Direct evaluation would exceed the configured term budget."""
