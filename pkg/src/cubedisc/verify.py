"""D(n), the power-of-three theorem check, and the checkpointed range scan."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import isqrt
from pathlib import Path

import numpy as np

from .casekit import CollisionCertificate, collide, k_of, verify_certificate
from .errors import ExhaustionError
from .modarith import cube_plus_self_mod

log = logging.getLogger(__name__)

# residue arrays above this size are processed in sorted chunks
MAX_TABLE_ENTRIES = 20_000_000
DEFAULT_CHUNK = 10_000


def ceil_sqrt(n: int) -> int:
    s = isqrt(n)
    return s if s * s == n else s + 1


def residue_injective(n: int, m: int) -> tuple[int, int] | None:
    """First colliding pair (smallest b, then a) of a^3 + a mod m^2 over 1..n."""
    m2 = m * m
    seen: dict[int, int] = {}
    for b in range(1, n + 1):
        v = cube_plus_self_mod(b, m2)
        a = seen.get(v)
        if a is not None:
            return a, b
        seen[v] = b
    return None


def first_collision_index(m: int, limit: int) -> int | None:
    """Smallest b <= limit such that b^3 + b repeats an earlier residue mod m^2.

    Vectorised counterpart of :func:`residue_injective`, used by the range scan.
    """
    m2 = m * m
    if limit > m2:
        # pigeonhole: a repeat occurs by b = m^2 + 1 at the latest
        limit = m2 + 1
    if m2 * limit >= 1 << 62 or limit > MAX_TABLE_ENTRIES:
        hit = residue_injective(limit, m)
        return None if hit is None else hit[1]
    a = np.arange(1, limit + 1, dtype=np.int64)
    res = (a * a % m2 * a + a) % m2
    _, first = np.unique(res, return_index=True)
    if len(first) == limit:
        return None
    dup = np.ones(limit, dtype=bool)
    dup[first] = False
    return int(np.argmax(dup)) + 1


def d_of(n: int) -> int:
    """Least m whose squared modulus separates a^3 + a for 1 <= a <= n.

    Every m < ceil(sqrt(n)) fails by pigeonhole; 3^k always succeeds.
    """
    k = k_of(n)
    for m in range(ceil_sqrt(n), 3**k):
        if residue_injective(n, m) is None:
            return m
    return 3**k


@dataclass(frozen=True)
class TheoremRow:
    n: int
    k: int
    D: int
    match: bool

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "D": self.D, "match": self.match}


def check_theorem(n: int) -> TheoremRow:
    k = k_of(n)
    d = d_of(n)
    return TheoremRow(n, k, d, d == 3**k)


def lemma1_check(n: int, samples: int = 100, seed: int = 0) -> bool:
    k = k_of(n)
    rng = random.Random(seed)
    for _ in range(samples):
        a = rng.randint(1, max(1, n - 1))
        b = rng.randint(a + 1, n) if a < n else a + 1
        lhs = b**3 + b - a**3 - a
        cofactor = a * a + a * b + b * b + 1
        if lhs != (b - a) * cofactor or cofactor % 3 == 0:
            return False
    return residue_injective(n, 3**k) is None


class Lemma2Failure(ExhaustionError):
    def __init__(self, n: int, failed: list[int], certificates: list[CollisionCertificate]):
        self.failed = failed
        self.certificates = certificates
        super().__init__(n, failed[0], f"moduli without collision: {failed}")


def lemma2_moduli(n: int) -> range:
    """All m with sqrt(n) < m < 3^k."""
    return range(isqrt(n) + 1, 3 ** k_of(n))


def lemma2_scan(n: int) -> list[CollisionCertificate]:
    certs, failed = [], []
    for m in lemma2_moduli(n):
        try:
            cert = collide(n, m)
        except ExhaustionError:
            failed.append(m)
            continue
        if not verify_certificate(cert):
            failed.append(m)
            continue
        certs.append(cert)
    if failed:
        raise Lemma2Failure(n, failed, certs)
    return certs


# --- range scan ------------------------------------------------------------------


def scan_chunk(lo: int, hi: int) -> list[TheoremRow]:
    """check_theorem for every n in [lo, hi], sharing one collision table.

    D(n) = min{m : first collision index of m exceeds n}, which is
    non-decreasing in n, so a single pointer sweep over m suffices.
    """
    m_lo = max(1, ceil_sqrt(lo))
    m_hi = 3 ** k_of(hi)
    firsts = {}
    for m in range(m_lo, m_hi + 1):
        idx = first_collision_index(m, hi)
        firsts[m] = hi + 1 if idx is None else idx
    rows = []
    m = m_lo
    for n in range(lo, hi + 1):
        while firsts[m] <= n:
            m += 1
        k = k_of(n)
        rows.append(TheoremRow(n, k, m, m == 3**k))
    return rows


def _scan_chunk_tuples(bounds: tuple[int, int]) -> list[tuple[int, int, int, bool]]:
    return [(r.n, r.k, r.D, r.match) for r in scan_chunk(*bounds)]


@dataclass
class ScanReport:
    n_lo: int
    n_hi: int
    rows: list[TheoremRow] = field(default_factory=list)
    wall_time: float = 0.0
    worker_count: int = 1

    @property
    def failures(self) -> list[int]:
        return [r.n for r in self.rows if not r.match]

    @property
    def ok(self) -> bool:
        return not self.failures and len(self.rows) == self.n_hi - self.n_lo + 1

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "k", "D", "match"])
        for r in self.rows:
            w.writerow([r.n, r.k, r.D, str(r.match).lower()])
        return buf.getvalue()

    def to_dict(self, rows: bool = True) -> dict:
        out = {
            "n_lo": self.n_lo,
            "n_hi": self.n_hi,
            "count": len(self.rows),
            "failures": self.failures,
            "wall_time": self.wall_time,
            "worker_count": self.worker_count,
        }
        if rows:
            out["rows"] = [r.to_dict() for r in self.rows]
        return out


def chunk_bounds(n_lo: int, n_hi: int, chunk: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk - 1, n_hi)) for lo in range(n_lo, n_hi + 1, chunk)]


def _digest(payload: str) -> str:
    return hashlib.sha256(payload.encode()).hexdigest()


class Checkpoint:
    """Append-only JSON lines, one completed chunk per line, each with its own digest.

    A torn or tampered trailing line fails its digest and is ignored on load.
    """

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)

    def load(self) -> dict[tuple[int, int], list[tuple]]:
        done: dict[tuple[int, int], list[tuple]] = {}
        if not self.path.exists():
            return done
        for line in self.path.read_text().splitlines():
            try:
                rec = json.loads(line)
                body = json.dumps(rec["rows"], separators=(",", ":"))
                if _digest(f"{rec['lo']}:{rec['hi']}:{body}") != rec["digest"]:
                    raise ValueError("digest mismatch")
            except (ValueError, KeyError, TypeError):
                log.warning("ignoring corrupt checkpoint line in %s", self.path)
                continue
            done[(rec["lo"], rec["hi"])] = [tuple(r) for r in rec["rows"]]
        return done

    def touch(self) -> None:
        with open(self.path, "a"):
            pass

    def append(self, lo: int, hi: int, rows: list[tuple]) -> None:
        body = json.dumps([list(r) for r in rows], separators=(",", ":"))
        digest = _digest(f"{lo}:{hi}:{body}")
        line = f'{{"lo":{lo},"hi":{hi},"rows":{body},"digest":"{digest}"}}\n'
        with open(self.path, "a") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())


def range_scan(
    n_lo: int,
    n_hi: int,
    workers: int = 1,
    checkpoint_path: str | os.PathLike | None = None,
    chunk: int = DEFAULT_CHUNK,
    max_chunks: int | None = None,
) -> ScanReport:
    """Check D(n) = 3^k(n) for every n in [n_lo, n_hi].

    ``max_chunks`` stops after that many newly computed chunks; it exists to
    simulate an interrupted run.
    """
    if not 2 <= n_lo <= n_hi:
        raise ValueError("need 2 <= n_lo <= n_hi")
    t0 = time.perf_counter()
    ckpt = Checkpoint(checkpoint_path) if checkpoint_path is not None else None
    done = {}
    if ckpt is not None:
        ckpt.touch()  # surface unwritable paths before any work
        done = ckpt.load()
    todo = [b for b in chunk_bounds(n_lo, n_hi, chunk) if b not in done]
    if max_chunks is not None:
        todo = todo[:max_chunks]
    results = dict(done)

    def record(bounds, rows):
        results[bounds] = rows
        if ckpt is not None:
            ckpt.append(*bounds, rows)

    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for bounds, rows in zip(todo, pool.map(_scan_chunk_tuples, todo)):
                record(bounds, rows)
    else:
        for bounds in todo:
            record(bounds, _scan_chunk_tuples(bounds))

    rows = []
    for bounds in chunk_bounds(n_lo, n_hi, chunk):
        rows.extend(TheoremRow(*r) for r in results.get(bounds, []))
    return ScanReport(n_lo, n_hi, rows, time.perf_counter() - t0, workers)
