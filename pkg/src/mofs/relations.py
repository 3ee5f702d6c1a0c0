"""Parity relations on the orthogonal array of a set of frequency squares.

A relation picks a subset of rows, of columns, and of symbols for each
square, such that every orthogonal-array row lands in an even number of the
chosen subsets. Relations form a GF(2) space; every vector is a Python int
used as a bitset over ``2n + m*k`` indicator bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import MofsSet


def orthogonal_array(mofs: MofsSet) -> np.ndarray:
    """Rows ``[i, j, F_1[i,j], ..., F_k[i,j]]`` for every cell in row-major order."""
    n = mofs.n
    ii, jj = np.divmod(np.arange(n * n), n)
    cols = [ii, jj] + [s.grid.ravel() for s in mofs]
    return np.stack(cols, axis=1)


@dataclass(frozen=True)
class Relation:
    rows: frozenset[int]
    cols: frozenset[int]
    symbols: tuple[frozenset[int], ...]

    def holds_on(self, oa: np.ndarray) -> bool:
        sets = (self.rows, self.cols) + self.symbols
        for line in oa:
            if sum(int(v) in s for v, s in zip(line, sets)) % 2:
                return False
        return True

    @property
    def is_jp(self) -> bool:
        return self.is_jp_for(None)

    def is_jp_for(self, n: int | None) -> bool:
        if any(len(s) != 1 for s in self.symbols):
            return False
        def proper(x):
            return bool(x) and (n is None or len(x) < n)
        return proper(self.rows) or proper(self.cols)

    def __str__(self) -> str:
        def fmt(s):
            return "{" + ",".join(map(str, sorted(s))) + "}"
        return "(" + ", ".join(fmt(s) for s in (self.rows, self.cols) + self.symbols) + ")"


class RelationLayout:
    """Bit positions: rows 0..n-1, columns n..2n-1, then m bits per square."""

    def __init__(self, n: int, m: int, k: int):
        self.n, self.m, self.k = n, m, k
        self.width = 2 * n + m * k

    def row_bit(self, i: int) -> int:
        return i

    def col_bit(self, j: int) -> int:
        return self.n + j

    def sym_bit(self, t: int, s: int) -> int:
        return 2 * self.n + t * self.m + s

    def decode(self, v: int) -> Relation:
        n, m = self.n, self.m
        bits = [(v >> b) & 1 for b in range(self.width)]
        rows = frozenset(i for i in range(n) if bits[i])
        cols = frozenset(j for j in range(n) if bits[n + j])
        syms = tuple(frozenset(s for s in range(m) if bits[2 * n + t * m + s])
                     for t in range(self.k))
        return Relation(rows, cols, syms)

    def encode(self, rel: Relation) -> int:
        v = 0
        for i in rel.rows:
            v |= 1 << self.row_bit(i)
        for j in rel.cols:
            v |= 1 << self.col_bit(j)
        for t, syms in enumerate(rel.symbols):
            for s in syms:
                v |= 1 << self.sym_bit(t, s)
        return v


def cell_equations(mofs: MofsSet) -> list[int]:
    lay = RelationLayout(mofs.n, mofs.m, mofs.k)
    eqs = []
    for line in orthogonal_array(mofs):
        v = (1 << lay.row_bit(int(line[0]))) | (1 << lay.col_bit(int(line[1])))
        for t, s in enumerate(line[2:]):
            v |= 1 << lay.sym_bit(t, int(s))
        eqs.append(v)
    return eqs


def gf2_nullspace(equations: list[int], width: int) -> list[int]:
    """Basis of {x : popcount(e & x) even for every equation e}."""
    pivots: dict[int, int] = {}  # pivot bit -> reduced row
    for e in equations:
        for b, row in pivots.items():
            if (e >> b) & 1:
                e ^= row
        if not e:
            continue
        b = e.bit_length() - 1
        for pb in list(pivots):
            if (pivots[pb] >> b) & 1:
                pivots[pb] ^= e
        pivots[b] = e
    basis = []
    for free in range(width):
        if free in pivots:
            continue
        v = 1 << free
        for b, row in pivots.items():
            if (row >> free) & 1:
                v |= 1 << b
        basis.append(v)
    return basis


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


@dataclass
class RelationSpace:
    layout: RelationLayout
    basis: list[int]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def relations(self) -> list[Relation]:
        return [self.layout.decode(v) for v in self.basis]


def relation_space(mofs: MofsSet) -> RelationSpace:
    """GF(2) basis of all relations, each re-checked against the cell equations."""
    lay = RelationLayout(mofs.n, mofs.m, mofs.k)
    eqs = cell_equations(mofs)
    basis = gf2_nullspace(eqs, lay.width)
    for v in basis:
        if any(_parity(e & v) for e in eqs):
            raise AssertionError("nullspace vector violates a cell equation")
    return RelationSpace(lay, basis)


@dataclass
class JpSearch:
    relations: list[Relation] = field(default_factory=list)
    truncated: bool = False
    states_visited: int = 0


def _mask(flags) -> int:
    return sum(1 << i for i, f in enumerate(flags) if f)


def _bits(mask: int, n: int) -> np.ndarray:
    return np.array([(mask >> i) & 1 for i in range(n)], dtype=np.int64)


def _members(mask: int, n: int) -> frozenset[int]:
    return frozenset(i for i in range(n) if (mask >> i) & 1)


def _reduced_indicator(grid: np.ndarray, symbol: int) -> int:
    """Bitset over (n-1)^2 cells of the symbol indicator reduced modulo row+column sums."""
    M = (grid == symbol).astype(np.int64)
    R = (M + M[:, :1] + M[:1, :] + M[0, 0]) % 2
    return _mask(R[1:, 1:].ravel())


def find_jp_relations(mofs: MofsSet, limit: int | None = None,
                      state_limit: int = 1 << 20, max_results: int = 4096) -> JpSearch:
    """All relations with one symbol per square and a proper row or column subset.

    A DP over squares tracks which reduced indicator sums are reachable; a
    symbol choice yields a relation exactly when its sum vanishes. The list
    is complete unless ``truncated`` is set, which happens when the DP or
    the backward enumeration exceeds ``state_limit`` steps, or when more
    than ``max_results`` relations exist and no ``limit`` was given.
    """
    m, k = mofs.m, mofs.k
    out = JpSearch()
    if k == 0:
        return out
    red = [[_reduced_indicator(F.grid, s) for s in range(m)] for F in mofs]
    layers: list[set[int]] = [{0}]
    for t in range(k):
        nxt = {v ^ red[t][s] for v in layers[-1] for s in range(m)}
        out.states_visited += len(nxt)
        if out.states_visited > state_limit:
            out.truncated = True
            return out
        layers.append(nxt)
    if 0 in layers[-1]:
        cap = limit if limit is not None else max_results
        _collect(mofs, red, layers, out, cap, state_limit)
        if limit is None and len(out.relations) >= max_results:
            out.truncated = True
    return out


def _collect(mofs: MofsSet, red, layers, out: JpSearch, cap: int, state_limit: int) -> None:
    n, k = mofs.n, mofs.k
    grids = [F.grid for F in mofs]
    choice = [0] * k

    class Stop(Exception):
        pass

    full = (1 << n) - 1
    first_row = [[_mask(g[0] == s) for s in range(mofs.m)] for g in grids]
    first_col = [[_mask(g[:, 0] == s) for s in range(mofs.m)] for g in grids]

    def emit() -> None:
        c = r = 0
        for t, s in enumerate(choice):
            c ^= first_row[t][s]
            r ^= first_col[t][s]
        if c & 1:
            r ^= full
        if r in (0, full) and c in (0, full):
            return
        B = np.zeros((n, n), dtype=np.int64)
        for t, s in enumerate(choice):
            B ^= (grids[t] == s).astype(np.int64)
        rv, cv = _bits(r, n), _bits(c, n)
        if not ((rv[:, None] + cv[None, :]) % 2 == B).all():
            raise AssertionError("reduced sum vanished but cell system is inconsistent")
        syms = tuple(frozenset([s]) for s in choice)
        for rr, cc in ((r, c), (r ^ full, c ^ full)):
            out.relations.append(Relation(_members(rr, n), _members(cc, n), syms))
        if len(out.relations) >= cap:
            raise Stop

    def back(t: int, target: int) -> None:
        out.states_visited += 1
        if out.states_visited > state_limit:
            out.truncated = True
            raise Stop
        if t == 0:
            emit()
            return
        for s in range(mofs.m):
            prev = target ^ red[t - 1][s]
            if prev in layers[t - 1]:
                choice[t - 1] = s
                back(t - 1, prev)

    try:
        back(k, 0)
    except Stop:
        pass
    del out.relations[cap:]
    out.relations.sort(key=lambda rel: ([min(x) for x in rel.symbols], sorted(rel.rows),
                                        sorted(rel.cols)))


def certify_maximal_by_relation(mofs: MofsSet) -> bool:
    """True when the frequency is odd and a Jedwab-Popatia relation exists; this implies maximality."""
    if (mofs.n // mofs.m) % 2 == 0:
        return False
    return bool(find_jp_relations(mofs, limit=1).relations)
