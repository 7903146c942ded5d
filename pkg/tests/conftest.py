import cmath
import math

import pytest


def e(x: float) -> complex:
    return cmath.exp(2j * math.pi * x)


def square_table(p: int) -> set[int]:
    return {x * x % p for x in range(1, p)}


def collides_by_table(n: int, m: int, a: int, b: int) -> bool:
    m2 = m * m
    return 1 <= a < b <= n and (a**3 + a) % m2 == (b**3 + b) % m2


@pytest.fixture(scope="session")
def small_primes():
    return [p for p in range(3, 102) if all(p % q for q in range(2, int(p**0.5) + 1))]


ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
