"""Indicator matrices of a set of frequency squares and their exact rank.

The family is the all-ones matrix, the row and column indicators for
indices 1..n-1, and for each square t and symbol s in 1..m-1 the indicator
of the cells holding s. For any set of MOFS these are linearly independent
over the rationals, which bounds the set size.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import FrequencySquare, MofsSet


@dataclass(frozen=True)
class Bound:
    value: Fraction
    integral: bool

    def __int__(self) -> int:
        return int(self.value)


def hrs_bound(n: int, m: int) -> Bound:
    """Upper bound (n-1)^2/(m-1) on the size of a set of MOFS of type (n; n/m)."""
    if m < 2 or n % m:
        raise ValueError("need m >= 2 dividing n")
    v = Fraction((n - 1) ** 2, m - 1)
    return Bound(v, v.denominator == 1)


@dataclass(frozen=True)
class IndicatorFamily:
    n: int
    m: int
    k: int
    labels: tuple[tuple, ...]
    vectors: np.ndarray  # (size, n*n) 0/1

    @property
    def size(self) -> int:
        return len(self.labels)

    def matrix(self, label) -> np.ndarray:
        return self.vectors[self.labels.index(label)].reshape(self.n, self.n)


def indicator_family(mofs: MofsSet) -> IndicatorFamily:
    n, m = mofs.n, mofs.m
    labels: list[tuple] = [("J",)]
    vecs = [np.ones((n, n), dtype=np.int64)]
    for r in range(1, n):
        M = np.zeros((n, n), dtype=np.int64)
        M[r] = 1
        labels.append(("R", r))
        vecs.append(M)
    for c in range(1, n):
        M = np.zeros((n, n), dtype=np.int64)
        M[:, c] = 1
        labels.append(("C", c))
        vecs.append(M)
    for t, F in enumerate(mofs, start=1):
        for s in range(1, m):
            labels.append(("S", s, t))
            vecs.append((F.grid == s).astype(np.int64))
    arr = np.stack([v.ravel() for v in vecs])
    arr.setflags(write=False)
    return IndicatorFamily(n, m, mofs.k, tuple(labels), arr)


def bareiss_rank(rows) -> int:
    """Exact rank of an integer matrix by fraction-free elimination."""
    M = [[int(x) for x in row] for row in rows]
    if not M:
        return 0
    nrows, ncols = len(M), len(M[0])
    rank, prev = 0, 1
    for col in range(ncols):
        pivot = next((r for r in range(rank, nrows) if M[r][col]), None)
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        piv = M[rank][col]
        for r in range(rank + 1, nrows):
            a = M[r][col]
            row_r, row_p = M[r], M[rank]
            # Bareiss update: divisions are exact
            M[r] = [(piv * row_r[j] - a * row_p[j]) // prev for j in range(ncols)]
        prev = piv
        rank += 1
        if rank == nrows:
            break
    return rank


@dataclass(frozen=True)
class IndependenceResult:
    rank: int
    size: int

    @property
    def independent(self) -> bool:
        return self.rank == self.size


def verify_independence(family: IndicatorFamily) -> IndependenceResult:
    return IndependenceResult(bareiss_rank(family.vectors.tolist()), family.size)


def primed_vectors(family: IndicatorFamily) -> dict[tuple, np.ndarray]:
    """Centered versions n*R - J, n*C - J, m*S - J of the non-J vectors."""
    J = family.vectors[0]
    out = {}
    for label, v in zip(family.labels[1:], family.vectors[1:]):
        scale = family.m if label[0] == "S" else family.n
        out[label] = scale * v - J
    return out


def block_count_matrix(F: FrequencySquare, d: int, symbol: int) -> np.ndarray:
    """Occurrences of ``symbol`` in each d x d block of F."""
    if d < 1 or F.n % d:
        raise ValueError(f"block size {d} does not divide order {F.n}")
    b = F.n // d
    hits = (F.grid == symbol).astype(np.int64)
    return hits.reshape(b, d, b, d).sum(axis=(1, 3))
