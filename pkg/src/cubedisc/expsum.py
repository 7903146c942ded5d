"""Numerical evaluation of the exponential sums behind the p = 2 (mod 3) case.

Notation follows the usual conventions: e(x) = exp(2 pi i x), f(a, b) =
delta^4 (a^2 + ab + b^2), N counts (a, b) in [1, X]^2 with
f(a, b) + 1 = 0 mod p^(2r), and T_j, S_j(x, y) are the complete and
incomplete sums over units c mod p^j.

Phase numerators are always reduced modulo the denominator in exact integer
arithmetic before any trigonometric call.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, DomainError
from .modarith import inv_mod, is_prime, jacobi_prime_power, legendre_symbol, mobius_prime_power

# term-count caps for literal evaluation
DIRECT_BUDGET = 10**8
BRUTE_BUDGET = 10**8


@dataclass(frozen=True)
class ExpSumCtx:
    delta: int
    p: int
    r: int
    X: int
    rho: int

    @property
    def modulus(self) -> int:
        return self.p ** (2 * self.r)

    def f(self, a, b):
        return self.delta**4 * (a * a + a * b + b * b)


def make_ctx(delta: int, p: int, r: int) -> ExpSumCtx:
    if delta not in (1, 2, 3):
        raise DomainError("delta must be 1, 2 or 3")
    if p < 5 or not is_prime(p):
        raise DomainError(f"p={p} must be a prime >= 5")
    if p % 3 != 2:
        raise DomainError(f"p={p} is not 2 mod 3")
    if r < 1:
        raise DomainError("r must be >= 1")
    if p == 5:
        X, rho = (p * p // 9) * p ** (2 * r - 2), 2 * r - 2
    else:
        X, rho = (p // 9) * p ** (2 * r - 1), 2 * r - 1
    return ExpSumCtx(delta, p, r, X, rho)


def unit_phase(num: int, den: int) -> complex:
    if den < 1:
        raise DomainError("denominator must be >= 1")
    return cmath.exp(2j * math.pi * ((num % den) / den))


def _phases(nums: np.ndarray, den: int) -> np.ndarray:
    return np.exp(2j * np.pi * (np.mod(nums, den) / den))


def csum(values) -> complex:
    """Compensated (fsum) summation of complex terms."""
    arr = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(arr.real), math.fsum(arr.imag))


def _units(p: int, j: int) -> np.ndarray:
    q = p**j
    c = np.arange(1, q + 1, dtype=np.int64)
    return c[c % p != 0]


def _epsilon(p: int, j: int) -> complex:
    return 1 if p**j % 4 == 1 else 1j


def gauss_sum(c: int, p: int, j: int, method: str = "direct") -> complex:
    q = p**j
    if method == "direct":
        a = np.arange(1, q + 1, dtype=np.int64)
        return csum(_phases(c % q * (a * a % q), q))
    if method == "closed":
        if c % p == 0:
            raise DomainError("closed form needs gcd(c, p) = 1")
        return math.sqrt(q) * jacobi_prime_power(c, p, j) * _epsilon(p, j)
    raise DomainError(f"unknown method {method!r}")


def kloosterman(u: int, p: int, j: int) -> complex:
    """K(p^j; u) = sum over units c of e((c^-1 u + c) / p^j)."""
    q = p**j
    terms = [unit_phase(inv_mod(c, q) * u + c, q) for c in range(1, q + 1) if c % p]
    return csum(terms)


def s_j(x: int, y: int, ctx: ExpSumCtx, j: int, method: str = "direct") -> complex:
    p, q = ctx.p, ctx.p**j
    if j < 1:
        raise DomainError("j must be >= 1")
    if method == "direct":
        if (q - q // p) * q * q > DIRECT_BUDGET:
            raise BudgetError(f"S_j direct with p^j={q} exceeds the budget")
        a = np.arange(1, q + 1, dtype=np.int64)
        fa = ctx.f(a[:, None], a[None, :]) % q
        lin = (a[:, None] * x + a[None, :] * y) % q
        parts = [csum(_phases(c * fa + lin + c, q)) for c in _units(p, j)]
        return csum(parts)
    if method == "closed":
        d4 = ctx.delta**4
        form = -x * x + x * y - y * y
        terms = [unit_phase(inv_mod(3 * c * d4, q) * form + c, q) for c in range(1, q + 1) if c % p]
        return q * jacobi_prime_power(-3, p, j) * csum(terms)
    raise DomainError(f"unknown method {method!r}")


def s_j_grid(ctx: ExpSumCtx, j: int) -> np.ndarray:
    """S_j(x, y) for all x, y mod p^j (index [x mod q, y mod q]) via 2-D DFTs.

    For each unit c the inner double sum over (a, b) is a discrete Fourier
    transform of e(c f(a, b) / p^j); no closed form is used.
    """
    p, q = ctx.p, ctx.p**j
    if (q - q // p) * q * q * max(1, int(math.log2(q))) > DIRECT_BUDGET:
        raise BudgetError(f"S_j grid with p^j={q} exceeds the budget")
    a = np.arange(q, dtype=np.int64)
    fa = ctx.f(a[:, None], a[None, :]) % q
    out = np.zeros((q, q), dtype=complex)
    for c in _units(p, j):
        # ifft2 * q^2 = sum_{a,b} F[a,b] e(+(ax + by) / q)
        out += unit_phase(int(c), q) * np.fft.ifft2(_phases(c * fa, q)) * (q * q)
    return out


def value_histogram(ctx: ExpSumCtx, modulus: int) -> np.ndarray:
    """Counts of f(a, b) mod ``modulus`` over (a, b) in [1, X]^2."""
    X = ctx.X
    if X * X > DIRECT_BUDGET:
        raise BudgetError(f"X^2={X * X} exceeds the budget")
    d4 = ctx.delta**4 % modulus
    a = np.arange(1, X + 1, dtype=np.int64) % modulus
    hist = np.zeros(modulus, dtype=np.int64)
    sq = a * a % modulus
    for ai, si in zip(a.tolist(), sq.tolist()):
        vals = (si + ai * a + sq) % modulus * d4 % modulus
        hist += np.bincount(vals, minlength=modulus)
    return hist


def t_j(ctx: ExpSumCtx, j: int, method: str = "direct") -> complex:
    """T_j = sum over units c mod p^j and a, b in [1, X] of e((c f(a, b) + c) / p^j).

    ``direct`` groups the X^2 pairs by the residue of f(a, b) (exact integer
    counts) and evaluates the phase sum over c numerically via a DFT of the
    counts. ``literal`` sums every term and is only feasible for tiny cases.
    """
    p, q = ctx.p, ctx.p**j
    if j < 1:
        raise DomainError("j must be >= 1")
    if method == "closed_small_j":
        if j > ctx.rho:
            raise DomainError(f"closed form needs j <= rho={ctx.rho}")
        return complex(ctx.X**2 / q * jacobi_prime_power(-3, p, j) * mobius_prime_power(p, j))
    if method == "direct":
        hist = value_histogram(ctx, q)
        # G[c] = sum_v hist[v] e(c v / q)
        g = np.fft.ifft(hist.astype(float)) * q
        c = _units(p, j)
        return csum(g[c % q] * _phases(c, q))
    if method == "literal":
        X = ctx.X
        if (q - q // p) * X * X > DIRECT_BUDGET:
            raise BudgetError("literal T_j exceeds the budget")
        a = np.arange(1, X + 1, dtype=np.int64)
        fa = ctx.f(a[:, None], a[None, :]) % q
        return csum([csum(_phases(c * fa + c, q)) for c in _units(p, j)])
    raise DomainError(f"unknown method {method!r}")


def incomplete_sum(X: int, q: int) -> np.ndarray:
    """E[x] = sum_{a <= X} e(a x / q) for x = 0 .. q-1."""
    x = np.arange(q, dtype=np.int64)
    a = np.arange(1, X + 1, dtype=np.int64)
    out = np.zeros(q, dtype=complex)
    for start in range(0, X, 4096):
        block = a[start : start + 4096]
        out += _phases(np.outer(x, block) % q, q).sum(axis=1)
    return out


def t_j_transform(ctx: ExpSumCtx, j: int) -> complex:
    """T_j rebuilt from the S_j grid and incomplete sums:

    p^(-2j) sum_{x, y} S_j(x, y) conj(E(x)) conj(E(y)).
    """
    q = ctx.p**j
    grid = s_j_grid(ctx, j)
    e = np.conj(incomplete_sum(ctx.X, q))
    return complex(e @ grid @ e) / (q * q)


def n_count_brute(ctx: ExpSumCtx) -> int:
    if ctx.X**2 > BRUTE_BUDGET:
        raise BudgetError(f"X^2={ctx.X**2} exceeds the brute-force budget")
    q = ctx.modulus
    a = np.arange(1, ctx.X + 1, dtype=object if q > 1 << 20 else np.int64)
    total = 0
    d4 = ctx.delta**4
    for ai in range(1, ctx.X + 1):
        vals = (d4 * (ai * ai + ai * a + a * a) + 1) % q
        total += int(np.count_nonzero(vals == 0))
    return total


@dataclass
class NExpansion:
    value: float
    t_values: dict[int, complex]
    split_value: float | None = None

    @property
    def rounded(self) -> int:
        return round(self.value)


def n_count_expansion(ctx: ExpSumCtx) -> NExpansion:
    """N = X^2 / p^2r + p^-2r sum_{j=1}^{2r} T_j, plus the rho-split when rho >= 1."""
    q = ctx.modulus
    ts = {j: t_j(ctx, j) for j in range(1, 2 * ctx.r + 1)}
    value = (ctx.X**2 + math.fsum(t.real for t in ts.values())) / q
    split = None
    if ctx.rho >= 1:
        tail = math.fsum(ts[j].real for j in range(ctx.rho + 1, 2 * ctx.r + 1))
        split = ctx.X**2 / q * (1 + 1 / ctx.p) + tail / q
    return NExpansion(value, ts, split)


def n_count(ctx: ExpSumCtx, method: str = "brute"):
    if method == "brute":
        return n_count_brute(ctx)
    if method == "expansion":
        exp = n_count_expansion(ctx)
        if exp.split_value is not None and abs(exp.split_value - exp.value) > 1e-6 * max(1.0, abs(exp.value)):
            raise AssertionError(f"split formula {exp.split_value} disagrees with {exp.value}")
        return exp.value
    raise DomainError(f"unknown method {method!r}")


# --- bounds -----------------------------------------------------------------------


@dataclass(frozen=True)
class BoundCheck:
    name: str
    measured: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.measured <= self.bound

    def to_dict(self) -> dict:
        return {"name": self.name, "measured": self.measured, "bound": self.bound, "pass": self.passed}


@dataclass
class BoundReport:
    p: int
    j: int
    checks: list[BoundCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"p": self.p, "j": self.j, "pass": self.passed, "checks": [c.to_dict() for c in self.checks]}


def kloosterman_max(p: int, j: int) -> float:
    q = p**j
    return max(abs(kloosterman(u, p, j)) for u in range(q))


def row_sum(X: int, p: int, j: int) -> float:
    """sum_{x=1}^{p^j} |sum_{a<=X} e(a x / p^j)|."""
    return math.fsum(np.abs(incomplete_sum(X, p**j)).tolist())


def check_bounds(ctx: ExpSumCtx, j: int, slack: float = 1e-6) -> BoundReport:
    """Measure the Kloosterman, row-sum, |T_j| and N-deviation bounds.

    The row-sum and |T_j| bounds are only asserted for rho < j <= 2r, and the
    deviation of N only when rho >= 1; outside those ranges they are omitted.
    """
    p, q = ctx.p, ctx.p**j
    if q * q > DIRECT_BUDGET:
        raise BudgetError(f"p^2j={q * q} exceeds the budget")
    rep = BoundReport(p, j)
    rep.checks.append(BoundCheck("kloosterman_max", kloosterman_max(p, j), 2 * math.sqrt(q) + slack))
    log_q = math.log(q)
    if ctx.rho < j <= 2 * ctx.r:
        rep.checks.append(BoundCheck("row_sum", row_sum(ctx.X, p, j), q * (2 + log_q)))
        rep.checks.append(BoundCheck("t_j_abs", abs(t_j(ctx, j)), 2 * q**1.5 * (2 + log_q) ** 2))
    if ctx.rho >= 1:
        n = n_count_brute(ctx)
        main = ctx.X**2 / ctx.modulus * (1 + 1 / p)
        bound = 2 * p**ctx.r * (2 + math.log(ctx.modulus)) ** 2
        if p == 5:
            bound *= 1 + 1 / (p * math.sqrt(p))
        rep.checks.append(BoundCheck("n_deviation", abs(n - main), bound))
    return rep


def monotone_witness(x: float) -> float:
    """x - 34 sqrt(2) (1 + 2 ln x); increasing for x > 68 sqrt(2)."""
    return x - 34 * math.sqrt(2) * (1 + 2 * math.log(x))


def threshold_check(p: int, r: int) -> dict:
    if p < 5 or not is_prime(p) or r < 1:
        raise DomainError("need a prime p >= 5 and r >= 1")
    pr = p**r
    log_term = (1 + math.log(pr)) ** 2
    q = math.sqrt(pr)
    return {
        "p": p,
        "r": r,
        "check1": pr > 2 * 5**4 * log_term,
        "check2": (p // 9) ** 2 * 17**2 >= p * p if p >= 11 else None,
        "check3": pr > 8 * 17**2 * log_term,
        "q": q,
        "f_q": monotone_witness(q),
        "relevant": "check1" if p == 5 else "check3",
    }


def diagonal_hits(ctx: ExpSumCtx) -> list[int]:
    """a <= X with f(a, a) + 1 = 0 mod p^2r (expected empty since (-3/p) = -1)."""
    q = ctx.modulus
    return [a for a in range(1, ctx.X + 1) if (ctx.f(a, a) + 1) % q == 0]


def minus3_is_nonresidue(p: int) -> bool:
    return legendre_symbol(-3, p) == -1


def identity_suite(ctx: ExpSumCtx, s_j_cap: int = 25, transform_cap: int = 125) -> list[BoundCheck]:
    """Closed-form-versus-direct checks for one context.

    Each entry records the absolute discrepancy as ``measured`` and the
    allowed tolerance as ``bound``.
    """
    p, r = ctx.p, ctx.r
    out = []
    brute = n_count_brute(ctx)
    exp = n_count_expansion(ctx)
    out.append(BoundCheck("n_expansion", abs(exp.value - brute), 1e-4))
    out.append(BoundCheck("n_expansion_rounded", float(exp.rounded != brute), 0.0))
    if exp.split_value is not None:
        out.append(BoundCheck("n_split", abs(exp.split_value - brute), 1e-4))
    for j in range(1, ctx.rho + 1):
        diff = abs(exp.t_values[j] - t_j(ctx, j, "closed_small_j"))
        out.append(BoundCheck(f"t_{j}_closed", diff, 1e-6))
    for j in range(1, 2 * r + 1):
        q = p**j
        if q > s_j_cap:
            break
        worst = 0.0
        for x in range(q):
            for y in range(q):
                worst = max(worst, abs(s_j(x, y, ctx, j) - s_j(x, y, ctx, j, "closed")))
        out.append(BoundCheck(f"s_{j}_closed", worst, 1e-9 * q**1.5))
    for j in range(ctx.rho + 1, 2 * r + 1):
        if p**j > transform_cap:
            break
        t = exp.t_values[j]
        diff = abs(t_j_transform(ctx, j) - t)
        out.append(BoundCheck(f"t_{j}_transform", diff, 1e-6 * max(1.0, abs(t))))
    out.append(BoundCheck("diagonal_hits", float(len(diagonal_hits(ctx))), 0.0))
    return out
