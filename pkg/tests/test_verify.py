import json

import pytest

from cubedisc.casekit import k_of, verify_certificate
from cubedisc.errors import DomainError
from cubedisc.verify import (
    Checkpoint,
    check_theorem,
    d_of,
    first_collision_index,
    lemma1_check,
    lemma2_scan,
    range_scan,
    residue_injective,
    scan_chunk,
)


def naive_d(n):
    m = 1
    while True:
        res = {(a**3 + a) % (m * m) for a in range(1, n + 1)}
        if len(res) == n:
            return m
        m += 1


def test_k_of():
    assert k_of(2) == 1
    assert k_of(81) == 2
    assert k_of(82) == 3
    with pytest.raises(DomainError):
        k_of(1)
    for n in range(2, 20000, 7):
        k = k_of(n)
        assert 9 ** (k - 1) < n <= 9**k or (k == 1 and n <= 9)


def test_residue_injective():
    assert residue_injective(9, 3) is None
    assert residue_injective(2, 2) == (1, 2)
    assert residue_injective(17, 1) == (1, 2)


def test_first_collision_index_matches_dict_scan():
    for m in range(1, 60):
        for limit in (5, 50, 400, 5000):
            hit = residue_injective(limit, m)
            assert first_collision_index(m, limit) == (None if hit is None else hit[1])


def test_d_of_examples():
    assert d_of(2) == 3
    assert d_of(9) == 3
    assert d_of(10) == 9


def test_d_of_matches_naive():
    for n in range(2, 200):
        d = d_of(n)
        assert d == naive_d(n)
        assert d * d >= n and d <= 3 ** k_of(n)


def test_check_theorem():
    assert check_theorem(2).to_dict() == {"n": 2, "k": 1, "D": 3, "match": True}
    assert check_theorem(81).to_dict() == {"n": 81, "k": 2, "D": 9, "match": True}
    assert check_theorem(100).to_dict() == {"n": 100, "k": 3, "D": 27, "match": True}


def test_lemma1():
    assert lemma1_check(9)
    assert lemma1_check(1000)
    a, b = 2, 5
    assert b**3 + b - a**3 - a == 120 == 3 * 40 and a * a + a * b + b * b + 1 == 40


def test_lemma2_scan():
    certs = lemma2_scan(100)
    assert [c.m for c in certs] == list(range(11, 27))
    assert all(verify_certificate(c) for c in certs)
    certs = lemma2_scan(10)
    assert [c.m for c in certs] == [4, 5, 6, 7, 8]
    certs = lemma2_scan(2)
    assert [(c.m, c.a, c.b) for c in certs] == [(2, 1, 2)]


def test_scan_chunk_matches_check_theorem():
    rows = scan_chunk(2, 400)
    assert [r.D for r in rows[:9]] == [3] * 8 + [9]
    assert rows == [check_theorem(n) for n in range(2, 401)]
    assert scan_chunk(350, 800) == [check_theorem(n) for n in range(350, 801)]


def test_range_scan_small():
    rep = range_scan(2, 1000, chunk=97)
    assert len(rep.rows) == 999 and rep.failures == [] and rep.ok
    assert [r.n for r in rep.rows] == list(range(2, 1001))


def test_range_scan_worker_count_invariant():
    one = range_scan(2, 3000, workers=1, chunk=500)
    two = range_scan(2, 3000, workers=2, chunk=500)
    assert one.to_csv() == two.to_csv()
    a, b = one.to_dict(), two.to_dict()
    for key in ("wall_time", "worker_count"):
        a.pop(key), b.pop(key)
    assert json.dumps(a) == json.dumps(b)


def test_range_scan_resume(tmp_path):
    ck = tmp_path / "scan.ckpt"
    full = range_scan(2, 2000, chunk=200)
    partial = range_scan(2, 2000, checkpoint_path=ck, chunk=200, max_chunks=5)
    assert len(partial.rows) == 1000
    assert len(ck.read_text().splitlines()) == 5
    resumed = range_scan(2, 2000, checkpoint_path=ck, chunk=200)
    assert resumed.to_csv() == full.to_csv()
    assert len(ck.read_text().splitlines()) == 10


def test_checkpoint_ignores_torn_line(tmp_path):
    ck = tmp_path / "scan.ckpt"
    range_scan(2, 400, checkpoint_path=ck, chunk=100, max_chunks=2)
    with open(ck, "a") as fh:
        fh.write('{"lo": 202, "hi": 301, "rows": [[202, 3')
    assert set(Checkpoint(ck).load()) == {(2, 101), (102, 201)}
    lines = ck.read_text().splitlines()
    lines[0] = lines[0].replace('"digest":"', '"digest":"0')
    ck.write_text("\n".join(lines) + "\n")
    assert set(Checkpoint(ck).load()) == {(102, 201)}
    rep = range_scan(2, 400, checkpoint_path=ck, chunk=100)
    assert rep.to_csv() == range_scan(2, 400).to_csv()


def test_range_scan_unwritable_checkpoint(tmp_path):
    with pytest.raises(OSError):
        range_scan(2, 10, checkpoint_path=tmp_path / "missing" / "x.ckpt")
