"""Modulus factorization, six-way case split and collision constructors.

Every constructor returns a pair (a, b) with 1 <= a < b and m^2 dividing
(b - a)(a^2 + ab + b^2 + 1) = (b^3 + b) - (a^3 + a), or None when its
construction does not land inside [1, n]. :func:`collide` wraps them with a
certificate check and an exhaustive fallback.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from .errors import ClassificationError, DomainError, ExhaustionError, RangeViolation
from .modarith import (
    cube_plus_self_mod,
    inv_mod,
    legendre_symbol,
    lift_sqrt_odd,
    solve_quadratic_2adic,
    sqrt_mod_prime,
)

# lemma-level n thresholds; below them the constructor is still attempted
THRESHOLDS = {"I": 100, "II": 64, "III": 144, "IV": 57, "V": 14, "VI": 2000}


def k_of(n: int) -> int:
    """Least positive j with 3^(2j) >= n."""
    if n < 2:
        raise DomainError("n must be >= 2")
    k = 1
    while 9**k < n:
        k += 1
    return k


@dataclass(frozen=True)
class FactoredModulus:
    m: int
    factors: tuple[tuple[int, int], ...]
    delta: int = 1
    p: int | None = None
    r: int | None = None

    def exponent(self, q: int) -> int:
        return dict(self.factors).get(q, 0)


def factorize(m: int) -> FactoredModulus:
    if m < 2:
        raise DomainError("m must be >= 2")
    if m > 1 << 63:
        raise DomainError("m exceeds the trial-division range")
    factors = []
    rest = m
    q = 2
    while q * q <= rest:
        if rest % q == 0:
            e = 0
            while rest % q == 0:
                rest //= q
                e += 1
            factors.append((q, e))
        q += 1 if q == 2 else 2
    if rest > 1:
        factors.append((rest, 1))
    big = [(q, e) for q, e in factors if q >= 5]
    if not big:
        return FactoredModulus(m, tuple(factors))
    p, r = big[-1]
    return FactoredModulus(m, tuple(factors), m // p**r, p, r)


class Case(str, Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"


@dataclass(frozen=True)
class CaseTag:
    case: Case
    params: dict = field(default_factory=dict)

    def __hash__(self) -> int:
        return hash((self.case, tuple(sorted(self.params.items()))))

    def __str__(self) -> str:
        return self.case.value

    def to_dict(self) -> dict:
        return {"case": self.case.value, **self.params}


@dataclass(frozen=True)
class RangeWitness:
    n: int
    m: int
    k: int


def validate_range(n: int, m: int) -> RangeWitness:
    if n < 2 or m < 2:
        raise DomainError("n and m must be >= 2")
    k = k_of(n)
    if not n < m * m:
        raise RangeViolation(n, m, "sqrt(n) < m")
    if not m < 3**k:
        raise RangeViolation(n, m, "m < 3^k")
    if not 9**k < 9 * n:
        raise RangeViolation(n, m, "3^k < 3 sqrt(n)")
    return RangeWitness(n, m, k)


def classify(fm: FactoredModulus | int) -> CaseTag:
    """Assign a case with priority II, III, I, VI, IV, V.

    For VI, primes >= 5 other than the largest are tried as the distinguished
    prime when the largest one has p^r < 11 (e.g. m = 175 = 7 * 5^2).
    """
    if isinstance(fm, int):
        fm = factorize(fm)
    r2, s3 = fm.exponent(2), fm.exponent(3)
    big = [(q, e) for q, e in fm.factors if q >= 5]
    if not big:
        if s3 == 0:
            return CaseTag(Case.II, {"r": r2})
        if r2 >= 1:
            return CaseTag(Case.III, {"r": r2, "s": s3})
        raise ClassificationError(f"m={fm.m} is a pure power of 3")
    if fm.delta <= 3:
        return CaseTag(Case.I, {"delta": fm.delta, "p": fm.p, "r": fm.r})
    for q, e in reversed(big):
        if q**e >= 11:
            return CaseTag(Case.VI, {"delta": fm.m // q**e, "p": q, "r": e})
    rest = dict(big)
    if rest == {5: 1}:
        return CaseTag(Case.IV, {"r": r2, "s": s3})
    if rest in ({7: 1}, {5: 1, 7: 1}):
        return CaseTag(Case.V, {"r": r2, "s": s3, "has5": 5 in rest})
    raise ClassificationError(f"m={fm.m} matches none of the six cases")


@dataclass(frozen=True)
class CollisionCertificate:
    n: int
    m: int
    a: int
    b: int
    quotient: int
    case_used: CaseTag | str

    @property
    def case_name(self) -> str:
        return str(self.case_used)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "a": self.a,
            "b": self.b,
            "quotient": self.quotient,
            "case": self.case_name,
        }


def collision_quotient(a: int, b: int, m: int) -> int | None:
    """(b - a)(a^2 + ab + b^2 + 1) / m^2, or None if not divisible."""
    q, rem = divmod((b - a) * (a * a + a * b + b * b + 1), m * m)
    return None if rem else q


def verify_certificate(cert: CollisionCertificate) -> bool:
    n, m, a, b = cert.n, cert.m, cert.a, cert.b
    if not (1 <= a < b <= n) or m < 1:
        return False
    m2 = m * m
    if cube_plus_self_mod(a, m2) != cube_plus_self_mod(b, m2):
        return False
    return cert.quotient * m2 == (b - a) * (a * a + a * b + b * b + 1)


def _certify(n: int, m: int, pair, case) -> CollisionCertificate | None:
    if pair is None:
        return None
    a, b = pair
    if not (1 <= a < b <= n):
        return None
    q = collision_quotient(a, b, m)
    if q is None:
        return None
    return CollisionCertificate(n, m, a, b, q, case)


# --- per-case constructors ---------------------------------------------------


def _case_i_pairs(n: int, delta: int, p: int, r: int) -> Iterator[tuple[int, int]]:
    pr = p**r
    if p % 3 == 1:
        # 3a^2 + 1 = 0 mod p^r, b = a + delta^2 p^r
        d = -inv_mod(3, pr) % pr
        x = lift_sqrt_odd(d, p, r)
        if x is None:
            return
        for root in (x, pr - x):
            a = root or pr
            yield a, a + delta * delta * pr
        return
    # p = 2 mod 3: a = delta^2 a', b = delta^2 b' with
    # delta^4 (a'^2 + a'b' + b'^2) + 1 = 0 mod p^2r, i.e.
    # (2b' + a')^2 = -3a'^2 - 4 inv(delta^4) mod p^2r
    q = pr * pr
    d2 = delta * delta
    limit = n // d2
    w = 4 * inv_mod(d2 * d2, q)
    inv2 = inv_mod(2, q)
    for a1 in range(1, limit + 1):
        disc = (-3 * a1 * a1 - w) % q
        if disc % p == 0 or legendre_symbol(disc, p) != 1:
            continue
        x = lift_sqrt_odd(disc, p, 2 * r)
        best = None
        for root in (x, q - x):
            b1 = (root - a1) * inv2 % q
            # smallest b1 > a1 in this residue class
            if b1 <= a1:
                b1 += ((a1 - b1) // q + 1) * q
            if b1 <= limit and (best is None or b1 < best):
                best = b1
        if best is not None:
            yield d2 * a1, d2 * best
            return


def collide_case_i(n: int, delta: int, p: int, r: int) -> CollisionCertificate | None:
    tag = CaseTag(Case.I, {"delta": delta, "p": p, "r": r})
    m = delta * p**r
    for pair in _case_i_pairs(n, delta, p, r):
        cert = _certify(n, m, pair, tag)
        if cert:
            return cert
    return None


def _case_ii_pair(r: int) -> tuple[int, int] | None:
    level = 2 * r - 2
    if level < 3:
        return None
    x = solve_quadratic_2adic(3, 0, 5, level, 1, j0=3)
    half = 1 << (2 * r - 3)
    x %= half
    if x > half // 2:
        x = half - x
    if x < 3:
        return None
    return x - 2, x + 2


def collide_case_ii(n: int, r: int) -> CollisionCertificate | None:
    return _certify(n, 2**r, _case_ii_pair(r), CaseTag(Case.II, {"r": r}))


def _lemma34_pair(r: int, t: int) -> tuple[int, int]:
    """a in [1, 2^2r] with 3a^2 + 3at^2 + t^4 + 1 = 0 mod 2^2r (t odd), b = a + t^2."""
    t2 = t * t
    a = solve_quadratic_2adic(3, 3 * t2, t2 * t2 + 1, 2 * r, 1, j0=1)
    return a, a + t2


def collide_case_iii(n: int, r: int, s: int) -> CollisionCertificate | None:
    tag = CaseTag(Case.III, {"r": r, "s": s})
    m = 2**r * 3**s
    if r >= 2 and s >= 2:
        pair = _lemma34_pair(r, 3**s)
    elif r == 1:
        pair = (1, 1 + 9**s)
    else:
        # s = 1: a^2 + a(a+9) + (a+9)^2 + 1 = 3a^2 + 27a + 82, equal to 112 at a = 1
        a = solve_quadratic_2adic(3, 27, 82, 2 * r, 1, j0=4)
        pair = (a, a + 9)
    return _certify(n, m, pair, tag)


def _lemma31_pairs(delta: int, p: int, r: int) -> Iterator[tuple[int, int]]:
    q = p ** (2 * r)
    d2 = delta * delta
    inv6 = inv_mod(6, q)
    for c in range(1, p + 1):
        val = -3 * d2 * d2 * c * c - 12
        if legendre_symbol(val, p) != 1:
            continue
        x = lift_sqrt_odd(val, p, 2 * r)
        for root in (x, q - x):
            a = (root - 3 * d2 * c) * inv6 % q
            a = a or q
            yield a, a + d2 * c


def _first_cert(n, m, pairs, tag):
    for pair in pairs:
        cert = _certify(n, m, pair, tag)
        if cert:
            return cert
    return None


def collide_case_iv(n: int, r: int, s: int) -> CollisionCertificate | None:
    tag = CaseTag(Case.IV, {"r": r, "s": s})
    m = 2**r * 3**s * 5
    if r >= 2:
        return _certify(n, m, _lemma34_pair(r, 3**s * 5), tag)
    return _first_cert(n, m, _lemma31_pairs(m // 5, 5, 1), tag)


def collide_case_v(n: int, r: int, s: int, has5: bool) -> CollisionCertificate | None:
    tag = CaseTag(Case.V, {"r": r, "s": s, "has5": has5})
    m = 2**r * 3**s * (35 if has5 else 7)
    t = m * m // (14 if r >= 1 else 7)
    return _certify(n, m, (3, 3 + t), tag)


def collide_case_vi(n: int, delta: int, p: int, r: int) -> CollisionCertificate | None:
    tag = CaseTag(Case.VI, {"delta": delta, "p": p, "r": r})
    return _first_cert(n, delta * p**r, _lemma31_pairs(delta, p, r), tag)


# --- fallback and dispatch ---------------------------------------------------


def brute_force_collision(n: int, m: int) -> CollisionCertificate | None:
    """Smallest gap b - a, then smallest a, over all colliding pairs in [1, n]."""
    m2 = m * m
    classes: dict[int, list[int]] = {}
    for a in range(1, n + 1):
        classes.setdefault(cube_plus_self_mod(a, m2), []).append(a)
    best = None
    for members in classes.values():
        for x, y in zip(members, members[1:]):
            key = (y - x, x)
            if best is None or key < best:
                best = key
    if best is None:
        return None
    d, a = best
    return CollisionCertificate(n, m, a, a + d, collision_quotient(a, a + d, m), "brute-force")


_DISPATCH = {
    Case.I: lambda n, p: collide_case_i(n, p["delta"], p["p"], p["r"]),
    Case.II: lambda n, p: collide_case_ii(n, p["r"]),
    Case.III: lambda n, p: collide_case_iii(n, p["r"], p["s"]),
    Case.IV: lambda n, p: collide_case_iv(n, p["r"], p["s"]),
    Case.V: lambda n, p: collide_case_v(n, p["r"], p["s"], p["has5"]),
    Case.VI: lambda n, p: collide_case_vi(n, p["delta"], p["p"], p["r"]),
}


def collide(n: int, m: int, *, check_range: bool = True) -> CollisionCertificate:
    if check_range:
        validate_range(n, m)
    tag = classify(factorize(m))
    cert = _DISPATCH[tag.case](n, tag.params)
    if cert is not None and verify_certificate(cert):
        return cert
    cert = brute_force_collision(n, m)
    if cert is None:
        raise ExhaustionError(n, m)
    return cert


def residue_collision_confirmed(n: int, m: int, a: int, b: int) -> bool:
    """Independent check through the residue table of a^3 + a mod m^2."""
    m2 = m * m
    table = [(x**3 + x) % m2 for x in range(n + 1)]
    return 1 <= a < b <= n and table[a] == table[b]


def n_threshold(tag: CaseTag) -> int:
    return THRESHOLDS[tag.case.value]


__all__ = [
    "Case",
    "CaseTag",
    "CollisionCertificate",
    "FactoredModulus",
    "RangeWitness",
    "THRESHOLDS",
    "brute_force_collision",
    "classify",
    "collide",
    "collide_case_i",
    "collide_case_ii",
    "collide_case_iii",
    "collide_case_iv",
    "collide_case_v",
    "collide_case_vi",
    "factorize",
    "k_of",
    "validate_range",
    "verify_certificate",
]
