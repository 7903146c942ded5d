"""Exact integer and modular arithmetic primitives.

Python integers are unbounded, so the overflow concerns of a fixed-width
implementation disappear; reductions are still applied at every multiply so
intermediate values stay small.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import DomainError

_SMALL_LIMIT = 1 << 16
# deterministic Miller-Rabin witnesses, exact for n < 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13):
        if n % q == 0:
            return n == q
    if n < _SMALL_LIMIT:
        f = 17
        while f * f <= n:
            if n % f == 0:
                return False
            f += 2
        return True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimePower:
    p: int
    e: int

    def __post_init__(self):
        if self.e < 1:
            raise DomainError(f"exponent must be >= 1, got {self.e}")
        if not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")

    @property
    def value(self) -> int:
        return self.p**self.e


def pow_mod(base: int, exp: int, modulus: int) -> int:
    """Square-and-multiply with a reduction after every product."""
    if modulus < 1:
        raise DomainError("modulus must be >= 1")
    if exp < 0:
        raise DomainError("exponent must be non-negative")
    result = 1 % modulus
    base %= modulus
    while exp:
        if exp & 1:
            result = result * base % modulus
        base = base * base % modulus
        exp >>= 1
    return result


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise DomainError(f"{p} is not an odd prime")


def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol (a/p) by Euler's criterion."""
    _check_odd_prime(p)
    t = pow_mod(a, (p - 1) // 2, p)
    if t == 0:
        return 0
    return 1 if t == 1 else -1


def jacobi_prime_power(a: int, p: int, j: int) -> int:
    if j < 1:
        raise DomainError("j must be >= 1")
    return legendre_symbol(a, p) ** j


def sqrt_mod_prime(d: int, p: int) -> int | None:
    """Tonelli-Shanks; returns the smaller of the two roots, or None for a non-residue."""
    _check_odd_prime(p)
    d %= p
    if d == 0:
        return 0
    if legendre_symbol(d, p) != 1:
        return None
    if p % 4 == 3:
        x = pow_mod(d, (p + 1) // 4, p)
        return min(x, p - x)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre_symbol(z, p) != -1:
        z += 1
    m, c, t, x = s, pow_mod(z, q, p), pow_mod(d, q, p), pow_mod(d, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow_mod(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, x = t * c % p, x * b % p
    return min(x, p - x)


def lift_sqrt_odd(d: int, p: int, e: int, root: int | None = None) -> int | None:
    """Hensel-lift a square root of the unit d from mod p to mod p^e.

    ``root`` selects the residue class mod p to lift; by default the smaller
    root returned by :func:`sqrt_mod_prime`.
    """
    _check_odd_prime(p)
    if e < 1:
        raise DomainError("e must be >= 1")
    if d % p == 0:
        raise DomainError("lifting square roots of non-units is not supported")
    x = sqrt_mod_prime(d, p) if root is None else root % p
    if x is None:
        return None
    if (x * x - d) % p:
        raise DomainError(f"{root} is not a square root of {d} mod {p}")
    mod = p
    for _ in range(1, e):
        mod *= p
        # x <- x - (x^2 - d) / (2x), computed mod the next power
        x = (x - (x * x - d) * inv_mod(2 * x, mod)) % mod
    return x % mod


def solve_quadratic_2adic(A: int, B: int, C: int, j: int, x0: int, j0: int = 1) -> int:
    """Solve A x^2 + B x + C = 0 mod 2^j by adding one bit per level.

    ``x0`` must satisfy the congruence mod 2^j0. When the derivative 2Ax + B is
    odd the increment at level i is 2^i; when A is odd and B even (x odd) the
    derivative has valuation one and the increment is 2^(i-1), which requires
    i >= 3. At every level c = 0 is tried before c = 1.
    """
    if j < 1 or j0 < 1:
        raise DomainError("levels must be >= 1")

    def val(x: int) -> int:
        return A * x * x + B * x + C

    if val(x0) % (1 << j0):
        raise DomainError(f"seed x0={x0} does not solve the congruence mod 2^{j0}")
    x = x0
    level = j0
    while level < j:
        target = 1 << (level + 1)
        if val(x) % target:
            step = 1 << level if (2 * A * x + B) % 2 else 1 << (level - 1)
            x += step
            if val(x) % target:
                raise DomainError(f"lift failed at level {level + 1}")
        level += 1
    x %= 1 << j
    return x if x else 1 << j


def mobius_prime_power(p: int, j: int) -> int:
    if j < 1:
        raise DomainError("j must be >= 1")
    return -1 if j == 1 else 0


def inv_mod(a: int, m: int) -> int:
    """Inverse of a modulo m via the extended Euclidean algorithm."""
    if m < 2:
        raise DomainError("modulus must be >= 2")
    old_r, r = a % m, m
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    if old_r != 1:
        raise DomainError(f"{a} is not invertible mod {m} (gcd {gcd(a, m)})")
    return old_s % m


def cube_plus_self_mod(a: int, m2: int) -> int:
    """(a^3 + a) mod m2 without forming a^3."""
    a %= m2
    return (a * a % m2 * a + a) % m2
