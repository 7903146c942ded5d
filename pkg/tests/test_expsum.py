import math

import pytest

from conftest import e
from cubedisc.errors import DomainError
from cubedisc.expsum import (
    check_bounds,
    diagonal_hits,
    gauss_sum,
    kloosterman,
    make_ctx,
    monotone_witness,
    n_count,
    n_count_expansion,
    row_sum,
    s_j,
    t_j,
    t_j_transform,
    threshold_check,
    unit_phase,
)
from cubedisc.modarith import inv_mod

CTXS = [(d, p, r) for d in (1, 2, 3) for p in (5, 11) for r in (1, 2)]


def test_unit_phase():
    assert unit_phase(0, 5) == 1
    assert abs(unit_phase(1, 4) - 1j) < 1e-12
    z = unit_phase(7, 5)
    assert abs(z - complex(math.cos(4 * math.pi / 5), math.sin(4 * math.pi / 5))) < 1e-12
    assert abs(z - complex(-0.809017, 0.587785)) < 1e-6
    with pytest.raises(DomainError):
        unit_phase(1, 0)


def test_make_ctx():
    c = make_ctx(1, 5, 2)
    assert (c.X, c.rho) == (50, 2)
    c = make_ctx(1, 11, 1)
    assert (c.X, c.rho) == (11, 1)
    c = make_ctx(2, 5, 1)
    assert (c.X, c.rho) == (2, 0)
    with pytest.raises(DomainError):
        make_ctx(1, 7, 1)
    with pytest.raises(DomainError):
        make_ctx(4, 5, 1)
    for d, p, r in CTXS + [(1, 17, 2), (2, 23, 1)]:
        c = make_ctx(d, p, r)
        assert c.X % p**c.rho == 0


def test_gauss_examples():
    assert abs(gauss_sum(1, 5, 1) - math.sqrt(5)) < 1e-9
    assert abs(gauss_sum(2, 5, 1, "closed") + math.sqrt(5)) < 1e-12
    assert abs(gauss_sum(1, 7, 1, "closed") - 2.6457513j) < 1e-7
    with pytest.raises(DomainError):
        gauss_sum(5, 5, 1, "closed")


@pytest.mark.parametrize("p,j", [(5, 1), (5, 2), (7, 1), (7, 2), (11, 1), (13, 1)])
def test_gauss_closed_vs_direct(p, j):
    q = p**j
    for c in range(1, q):
        if c % p:
            assert abs(gauss_sum(c, p, j) - gauss_sum(c, p, j, "closed")) < 1e-9 * math.sqrt(q)


def test_kloosterman_examples():
    assert abs(kloosterman(0, 5, 1) + 1) < 1e-12
    assert abs(kloosterman(5, 5, 2)) < 1e-9
    oracle = sum(e((inv_mod(c, 5) + c) / 5) for c in range(1, 5))
    assert abs(kloosterman(1, 5, 1) - oracle) < 1e-12
    assert abs(kloosterman(1, 5, 1) - 0.381966) < 1e-6


def test_s_j_examples():
    c = make_ctx(1, 5, 1)
    assert abs(s_j(0, 0, c, 1, "closed") - 5) < 1e-9
    assert abs(s_j(0, 0, c, 1) - 5) < 1e-9
    assert abs(s_j(1, 2, c, 1) - s_j(1, 2, c, 1, "closed")) < 1e-9


def test_s_j_direct_is_literal_sum():
    c = make_ctx(2, 5, 1)
    x, y = 3, 1
    lit = sum(
        e((k * c.f(a, b) + a * x + b * y + k) / 5) for k in range(1, 5) for a in range(1, 6) for b in range(1, 6)
    )
    assert abs(s_j(x, y, c, 1) - lit) < 1e-9


def test_t_j_examples():
    c = make_ctx(1, 5, 2)
    assert t_j(c, 1, "closed_small_j") == 500
    assert abs(t_j(c, 1) - 500) < 1e-6
    assert t_j(c, 2, "closed_small_j") == 0
    with pytest.raises(DomainError):
        t_j(c, 3, "closed_small_j")


@pytest.mark.parametrize("d,p,r", [(1, 5, 1), (2, 5, 1), (3, 11, 1), (2, 5, 2)])
def test_t_j_direct_vs_literal(d, p, r):
    c = make_ctx(d, p, r)
    for j in range(1, 2 * r + 1):
        if (p**j) * c.X**2 > 5 * 10**6:
            continue
        assert abs(t_j(c, j) - t_j(c, j, "literal")) < 1e-7 * max(1, c.X**2)


def test_t_j_transform_identity():
    for d, p, r, j in [(2, 5, 1, 1), (2, 5, 1, 2), (1, 11, 1, 2), (3, 5, 2, 3)]:
        c = make_ctx(d, p, r)
        t = t_j(c, j)
        assert abs(t_j_transform(c, j) - t) < 1e-6 * max(1.0, abs(t))


def test_n_count_examples():
    assert n_count(make_ctx(1, 5, 1)) == 0
    assert n_count(make_ctx(2, 5, 1)) == 0
    assert abs(n_count(make_ctx(1, 5, 1), "expansion")) < 1e-6


def brute_count(c):
    q = c.modulus
    return sum(1 for a in range(1, c.X + 1) for b in range(1, c.X + 1) if (c.f(a, b) + 1) % q == 0)


@pytest.mark.parametrize("d,p,r", [t for t in CTXS if t[1:] != (11, 2)])
def test_n_count_brute_vs_loop(d, p, r):
    c = make_ctx(d, p, r)
    assert n_count(c) == brute_count(c)


def test_n_split_matches_expansion():
    for d, p, r in CTXS:
        c = make_ctx(d, p, r)
        ex = n_count_expansion(c)
        if c.rho >= 1:
            assert abs(ex.split_value - ex.value) < 1e-6


def test_diagonal_never_hits():
    for d, p, r in CTXS:
        assert diagonal_hits(make_ctx(d, p, r)) == []


def test_row_sum_example():
    assert abs(row_sum(2, 5, 1) - 6.472136) < 1e-6
    assert row_sum(2, 5, 1) <= 5 * (2 + math.log(5))


def test_check_bounds_examples():
    rep = check_bounds(make_ctx(1, 5, 1), 2)
    names = {c.name: c for c in rep.checks}
    assert names["kloosterman_max"].measured <= 10 + 1e-6
    assert names["t_j_abs"].bound == pytest.approx(2 * 5**3 * (2 + math.log(25)) ** 2)
    assert rep.passed
    rep = check_bounds(make_ctx(1, 5, 1), 1)
    assert {c.name for c in rep.checks} == {"kloosterman_max", "row_sum", "t_j_abs"}
    assert check_bounds(make_ctx(1, 11, 1), 2).passed
    rep = check_bounds(make_ctx(2, 5, 2), 3)
    assert "n_deviation" in {c.name for c in rep.checks} and rep.passed


def test_thresholds():
    assert monotone_witness(680) > 0
    assert abs(monotone_witness(680) - (680 - 34 * math.sqrt(2) * (1 + 2 * math.log(680)))) < 1e-12
    res = threshold_check(5, 9)
    assert res["check1"] and res["relevant"] == "check1"
    res = threshold_check(11, 1)
    assert not res["check3"] and res["relevant"] == "check3"
    assert threshold_check(11, 1)["check2"]
