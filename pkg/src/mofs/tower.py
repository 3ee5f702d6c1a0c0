"""Binary mates for several binary squares at once, built two rows at a time.

For each pair of rows the columns are first split into pairs that balance
both rows of the first square. Each later (row, square) target is met by
merging parts so that every merged part carries exactly half ones; the
merge pattern comes from an integer decomposition in the polytope module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import FrequencySquare, Join, TypeMismatch, are_orthogonal
from .polytope import decompose, tower_constants


class TowerError(ValueError):
    pass


@dataclass(frozen=True)
class Equipartition:
    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        sizes = {len(p) for p in self.parts}
        if len(sizes) > 1:
            raise ValueError("parts must have equal size")
        cols = sorted(c for p in self.parts for c in p)
        if cols != list(range(len(cols))):
            raise ValueError("parts must cover 0..n-1 exactly once")

    @property
    def n(self) -> int:
        return sum(len(p) for p in self.parts)

    @property
    def beta(self) -> int:
        return len(self.parts) // 2

    @property
    def part_size(self) -> int:
        return len(self.parts[0]) if self.parts else 0


def _grid(join, square: int) -> np.ndarray:
    if isinstance(join, Join):
        return join.arrays[square]
    g = join[square]
    return g.grid if isinstance(g, FrequencySquare) else np.asarray(g)


def is_good(partition: Equipartition, join, row: int, square: int) -> bool:
    """Even part count, even part sizes, and half of each part is 1 in the given row."""
    if len(partition.parts) % 2 or partition.part_size % 2:
        return False
    line = _grid(join, square)[row]
    half = partition.part_size // 2
    return all(int(line[list(p)].sum()) == half for p in partition.parts)


def base_partition(join, r1: int, r2: int, square: int = 0) -> Equipartition:
    """Pair columns with complementary entries in both rows of one square."""
    g = _grid(join, square)
    a, b = g[r1], g[r2]
    cls = {(x, y): [c for c in range(len(a)) if (a[c], b[c]) == (x, y)]
           for x in (0, 1) for y in (0, 1)}
    if len(cls[0, 0]) != len(cls[1, 1]) or len(cls[0, 1]) != len(cls[1, 0]):
        raise TowerError("rows are not from a binary frequency square")
    pairs = list(zip(cls[0, 0], cls[1, 1])) + list(zip(cls[0, 1], cls[1, 0]))
    return Equipartition(tuple(sorted(tuple(sorted(p)) for p in pairs)))


def coarsen(partition: Equipartition, join, target_row: int, target_square: int,
            m_s: int, beta_s: int) -> Equipartition:
    """Merge parts into 2*beta_(s+1) parts, each half ones in the target row."""
    if len(partition.parts) != 2 * beta_s or partition.part_size != 2 * m_s:
        raise TowerError(f"expected {2 * beta_s} parts of size {2 * m_s}")
    line = _grid(join, target_square)[target_row]
    y = [int(line[list(p)].sum()) for p in partition.parts]
    x = [0] * (2 * m_s + 1)
    for v in y:
        x[v] += 1
    pieces = decompose(x, m_s, beta_s)
    # parts with equal y, in index order, handed out piece by piece
    pools = {i: [j for j in range(len(y)) if y[j] == i] for i in range(2 * m_s + 1)}
    cursor = dict.fromkeys(pools, 0)
    merged = []
    for piece in pieces:
        members: list[int] = []
        for i, count in enumerate(piece):
            members.extend(pools[i][cursor[i]:cursor[i] + count])
            cursor[i] += count
        merged.append(tuple(sorted(c for j in members for c in partition.parts[j])))
    return Equipartition(tuple(merged))


def required_modulus(k: int, cap: int | None = None) -> int | None:
    """4 * m_(2k), or None once the tower provably exceeds ``cap``."""
    if cap is None:
        return 4 * tower_constants(2 * k).m_i(2 * k)
    ms = [1, 1, 2][:2 * k]
    while len(ms) < 2 * k:
        # m_(i+1) >= 2 m_i (m_i - 1); stop before the lcm gets huge
        if 8 * ms[-1] * (ms[-1] - 1) > cap:
            return None
        ms = list(tower_constants(len(ms) + 1).m)
    return 4 * ms[-1] if 4 * ms[-1] <= cap else None


def _row_pair_partition(grids: Sequence[np.ndarray], r1: int, r2: int) -> Equipartition:
    n = grids[0].shape[0]
    ms = tower_constants(2 * len(grids)).m
    part = base_partition(grids, r1, r2, 0)
    done = [(r1, 0), (r2, 0)]
    targets = [(r, t) for t in range(1, len(grids)) for r in (r1, r2)]
    for s, (row, t) in enumerate(targets, start=2):
        m_s = ms[s - 1]
        part = coarsen(part, grids, row, t, m_s, n // (4 * m_s))
        done.append((row, t))
        for rr, tt in done:
            if not is_good(part, grids, rr, tt):
                raise AssertionError(f"partition lost goodness for row {rr}, square {tt}")
    return part


def tower_mate(squares: Sequence, n: int | None = None) -> FrequencySquare:
    """A binary square orthogonal to each of the given binary squares (which need not be mutually orthogonal)."""
    sq = [s if isinstance(s, FrequencySquare) else FrequencySquare(s, 2) for s in squares]
    if not sq:
        raise TowerError("need at least one square")
    order = sq[0].n
    if n is not None and n != order:
        raise TypeMismatch(f"squares have order {order}, not {n}")
    if any(s.n != order or s.m != 2 for s in sq):
        raise TypeMismatch("all squares must be binary of the same order")
    need = required_modulus(len(sq), cap=None if len(sq) <= 2 else order)
    if need is None:
        raise TowerError(f"requires 4*m_{2 * len(sq)} | n, which is far larger than n = {order}")
    if order % need:
        raise TowerError(f"requires {need} | n (got n = {order})")
    grids = [s.grid for s in sq]
    out = np.zeros((order, order), dtype=np.int64)
    for r1 in range(0, order, 2):
        r2 = r1 + 1
        part = _row_pair_partition(grids, r1, r2)
        half = len(part.parts) // 2
        ones = [c for p in part.parts[half:] for c in p]
        out[r1, ones] = 1
        out[r2, :] = 1 - out[r1, :]
    mate = FrequencySquare(out, 2)
    for s in sq:
        if not are_orthogonal(mate, s):
            raise AssertionError("tower output is not orthogonal to an input square")
    return mate
