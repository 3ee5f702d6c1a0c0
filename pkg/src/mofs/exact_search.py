"""Exhaustive search for frequency squares and orthogonal mates.

Squares are built one row at a time from the lexicographically ordered list
of admissible row patterns. That order agrees with filling cells row-major
with ascending symbols, so the first complete square found is the
lexicographically least one. Pruning uses per-column symbol capacities,
running pair counts against every square of the set, and a Hall-type bound
on how many of each pair the remaining rows can still supply.
"""

from __future__ import annotations

import enum
import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from .core import FrequencySquare, MofsSet, are_orthogonal

DEFAULT_NODE_LIMIT = int(os.environ.get("MOFS_NODE_LIMIT", 5_000_000))


@dataclass(frozen=True)
class SearchBudget:
    node_limit: int | None = DEFAULT_NODE_LIMIT
    time_limit: float | None = None
    shards: int = 1


class Status(enum.Enum):
    FOUND = "Found"
    NONE_EXISTS = "NoneExists"
    INDETERMINATE = "Indeterminate"


@dataclass
class MateResult:
    status: Status
    witness: FrequencySquare | None = None
    nodes: int = 0
    reason: str = ""
    transcript: list[str] | None = None

    @property
    def found(self) -> bool:
        return self.status is Status.FOUND


class BudgetExceeded(Exception):
    pass


@lru_cache(maxsize=None)
def row_patterns(n: int, m: int) -> np.ndarray:
    """All length-n rows with each of m symbols n/m times, in lexicographic order."""
    lam = n // m
    out: list[tuple[int, ...]] = []
    counts = [lam] * m
    row = [0] * n

    def rec(pos: int) -> None:
        if pos == n:
            out.append(tuple(row))
            return
        for s in range(m):
            if counts[s]:
                counts[s] -= 1
                row[pos] = s
                rec(pos + 1)
                counts[s] += 1

    rec(0)
    arr = np.array(out, dtype=np.int64).reshape(-1, n)
    arr.setflags(write=False)
    return arr


class _Searcher:
    """Depth-first row-by-row search for a square orthogonal to all of ``grids``."""

    def __init__(self, n: int, m: int, grids: list[np.ndarray], budget: SearchBudget,
                 transcript: list[str] | None = None):
        self.n, self.m, self.lam = n, m, n // m
        self.k = len(grids)
        self.grids = np.array(grids, dtype=np.int64).reshape(self.k, n, n)
        self.patterns = row_patterns(n, m)
        P = len(self.patterns)
        eye = np.eye(m, dtype=np.int64)
        self.onehot = eye[self.patterns].reshape(P, n * m)  # (P, n*m)
        # contrib[r][p, t, i, j]: cells c with F_t[r,c] = i and pattern p[c] = j
        self.contrib = []
        self.suffix = []
        for r in range(n):
            if self.k:
                Ft = eye[self.grids[:, r, :]]  # (k, n, m) one-hot of F_t[r, c]
                pat = eye[self.patterns]  # (P, n, m)
                self.contrib.append(np.einsum("tci,pcj->ptij", Ft, pat).reshape(P, -1))
            else:
                self.contrib.append(np.zeros((P, 0), dtype=np.int64))
        # suffix[r][t, c, i] = rows r' >= r with F_t[r', c] = i
        hot = eye[self.grids] if self.k else np.zeros((0, n, n, m), dtype=np.int64)
        cum = np.zeros((self.k, n, m), dtype=np.int64)
        self.suffix = [None] * (n + 1)
        self.suffix[n] = cum.copy()
        for r in range(n - 1, -1, -1):
            cum = cum + hot[:, r] if self.k else cum
            self.suffix[r] = cum.copy()
        self.budget = budget
        self.nodes = 0
        self.deadline = (time.monotonic() + budget.time_limit) if budget.time_limit else None
        self.transcript = transcript

    def _tick(self, count: int) -> None:
        self.nodes += count
        lim = self.budget.node_limit
        if lim is not None and self.nodes > lim:
            raise BudgetExceeded(f"node limit {lim} exceeded")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded(f"time limit {self.budget.time_limit}s exceeded")

    def candidates(self, r: int, col: np.ndarray, pair: np.ndarray,
                   subset: np.ndarray | None = None) -> np.ndarray:
        """Pattern indices admissible for row r given column and pair counts."""
        lam, n, m, k = self.lam, self.n, self.m, self.k
        idx = np.arange(len(self.patterns)) if subset is None else subset
        newcol = col[None, :] + self.onehot[idx]
        ok = (newcol <= lam).all(axis=1)
        if k:
            newpair = pair[None, :] + self.contrib[r][idx]
            ok &= (newpair <= lam * lam).all(axis=1)
            if r + 1 < n and ok.any():
                sel = np.nonzero(ok)[0]
                need_col = lam - newcol[sel].reshape(-1, n, m)  # (C, c, j)
                need_pair = (lam * lam - newpair[sel]).reshape(-1, k, m, m)  # (C, t, i, j)
                supply_rows = self.suffix[r + 1]  # (t, c, i)
                cap = np.minimum(need_col[:, None, :, None, :],
                                 supply_rows[None, :, :, :, None]).sum(axis=2)  # (C, t, i, j)
                good = (need_pair <= cap).all(axis=(1, 2, 3))
                ok[sel[~good]] = False
        return idx[ok]

    def search(self, first_rows: np.ndarray | None = None) -> np.ndarray | None:
        n, m, k = self.n, self.m, self.k
        col = np.zeros(n * m, dtype=np.int64)
        pair = np.zeros(k * m * m, dtype=np.int64)
        chosen: list[int] = []

        def rec(r: int, col, pair) -> bool:
            if r == n:
                return True
            cand = self.candidates(r, col, pair, first_rows if r == 0 else None)
            self._tick(len(cand) or 1)
            for p in cand:
                if self.transcript is not None:
                    self.transcript.append(f"depth {r} row {''.join(map(str, self.patterns[p]))}")
                chosen.append(int(p))
                if rec(r + 1, col + self.onehot[p], pair + self.contrib[r][p]):
                    return True
                chosen.pop()
            return False

        if rec(0, col, pair):
            return self.patterns[chosen]
        return None


def _run_shard(args) -> tuple[str, object, int]:
    n, m, grids, budget, first_rows = args
    s = _Searcher(n, m, grids, budget)
    try:
        grid = s.search(first_rows)
    except BudgetExceeded as exc:
        return ("budget", str(exc), s.nodes)
    return ("found", grid, s.nodes) if grid is not None else ("none", None, s.nodes)


def _verify_witness(mofs: MofsSet, grid: np.ndarray) -> FrequencySquare:
    F = FrequencySquare(grid, mofs.m)
    for i, G in enumerate(mofs):
        if not are_orthogonal(F, G):
            raise AssertionError(f"search witness not orthogonal to square {i}")
    return F


def find_mate(mofs: MofsSet, budget: SearchBudget | None = None,
              transcript: bool = False) -> MateResult:
    """Decide whether some square is orthogonal to every member of ``mofs``.

    A Found result carries the lexicographically least such square. With
    ``budget.shards > 1`` the first-row choices are split into contiguous
    shards run in separate processes; shard results are read in order so
    the verdict and witness do not depend on the shard count.
    """
    budget = budget or SearchBudget()
    n, m = mofs.n, mofs.m
    grids = [s.grid for s in mofs]
    if budget.shards <= 1 or transcript:
        log: list[str] | None = [] if transcript else None
        s = _Searcher(n, m, grids, budget, log)
        try:
            grid = s.search()
        except BudgetExceeded as exc:
            return MateResult(Status.INDETERMINATE, nodes=s.nodes, reason=str(exc), transcript=log)
        if grid is None:
            return MateResult(Status.NONE_EXISTS, nodes=s.nodes, transcript=log)
        return MateResult(Status.FOUND, _verify_witness(mofs, grid), s.nodes, transcript=log)

    probe = _Searcher(n, m, grids, budget)
    firsts = probe.candidates(0, np.zeros(n * m, dtype=np.int64),
                              np.zeros(len(grids) * m * m, dtype=np.int64))
    chunks = [c for c in np.array_split(firsts, budget.shards) if len(c)]
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        results = list(pool.map(_run_shard, [(n, m, grids, budget, c) for c in chunks]))
    nodes = sum(r[2] for r in results)
    for kind, payload, _ in results:
        if kind == "found":
            return MateResult(Status.FOUND, _verify_witness(mofs, payload), nodes)
        if kind == "budget":
            return MateResult(Status.INDETERMINATE, nodes=nodes, reason=str(payload))
    return MateResult(Status.NONE_EXISTS, nodes=nodes)


def is_maximal(mofs: MofsSet, budget: SearchBudget | None = None) -> bool | None:
    """True if no mate exists, False if one does, None when the budget ran out."""
    res = find_mate(mofs, budget)
    if res.status is Status.INDETERMINATE:
        return None
    return res.status is Status.NONE_EXISTS


def enumerate_squares(n: int, m: int, max_order: int = 6,
                      budget: SearchBudget | None = None,
                      first_row: tuple[int, ...] | None = None,
                      first_col: tuple[int, ...] | None = None) -> Iterator[FrequencySquare]:
    """Every type-(n; n/m) square once, in lexicographic order.

    ``first_row`` / ``first_col`` optionally fix the first row and column.
    """
    if n % m:
        raise ValueError(f"{m} does not divide {n}")
    if n > max_order:
        raise ValueError(f"order {n} exceeds the enumeration bound {max_order}")
    budget = budget or SearchBudget(node_limit=None)
    s = _Searcher(n, m, [], budget)
    pats = s.patterns
    lam = n // m
    allowed = [np.arange(len(pats))] * n
    if first_row is not None:
        allowed[0] = np.nonzero((pats == np.array(first_row)).all(axis=1))[0]
    if first_col is not None:
        allowed = [a[pats[a, 0] == first_col[r]] for r, a in enumerate(allowed)]
    chosen: list[int] = []

    def rec(r: int, col: np.ndarray):
        if r == n:
            yield FrequencySquare(pats[chosen], m, validate=False)
            return
        ok = allowed[r][((col[None, :] + s.onehot[allowed[r]]) <= lam).all(axis=1)]
        s._tick(len(ok) or 1)
        for p in ok:
            chosen.append(int(p))
            yield from rec(r + 1, col + s.onehot[p])
            chosen.pop()

    yield from rec(0, np.zeros(n * m, dtype=np.int64))


def count_squares(n: int, m: int) -> int:
    """Number of type-(n; n/m) squares, by recursion on sorted column needs.

    Independent of :func:`enumerate_squares`: the state is the multiset of
    per-column remaining symbol counts, so permuted columns share work.
    """
    if n % m:
        raise ValueError(f"{m} does not divide {n}")
    lam = n // m
    pats = [tuple(p) for p in itertools.product(range(m), repeat=n)
            if all(p.count(s) == lam for s in range(m))]

    @lru_cache(maxsize=None)
    def f(need: tuple[tuple[int, ...], ...]) -> int:
        if all(sum(c) == 0 for c in need):
            return 1
        total = 0
        for p in pats:
            if all(need[c][p[c]] for c in range(n)):
                nxt = tuple(sorted(tuple(v - (s == p[c]) for s, v in enumerate(need[c]))
                                   for c in range(n)))
                total += f(nxt)
        return total

    return f(tuple((lam,) * m for _ in range(n)))


@dataclass
class BachelorResult:
    square: FrequencySquare | None
    candidates_checked: int
    status: Status
    nodes: int = 0


def find_bachelor(n: int, budget: SearchBudget | None = None) -> BachelorResult:
    """Search binary squares of order n for one with no orthogonal mate.

    First row and first column are fixed to ``0..01..1`` since row and
    column permutations preserve both validity and mate existence.
    """
    if n % 2:
        raise ValueError("binary squares need even order")
    budget = budget or SearchBudget(node_limit=None)
    norm = tuple([0] * (n // 2) + [1] * (n // 2))
    checked, nodes = 0, 0
    for F in enumerate_squares(n, 2, max_order=max(6, n), first_row=norm, first_col=norm):
        checked += 1
        res = find_mate(MofsSet([F]), budget)
        nodes += res.nodes
        if res.status is Status.NONE_EXISTS:
            return BachelorResult(F, checked, Status.FOUND, nodes)
        if res.status is Status.INDETERMINATE:
            return BachelorResult(None, checked, Status.INDETERMINATE, nodes)
    return BachelorResult(None, checked, Status.NONE_EXISTS, nodes)
