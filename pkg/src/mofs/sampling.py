"""Seeded random generators for binary squares and orthogonal binary pairs."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .constructions import complete_mofs_prime_power, dilate
from .core import FrequencySquare, MofsSet, apply_isomorphism


def block_square(n: int) -> np.ndarray:
    h = n // 2
    return np.kron(np.array([[0, 1], [1, 0]]), np.ones((h, h), dtype=np.int64))


def random_binary_square(n: int, rng: np.random.Generator, sweeps: int = 20) -> FrequencySquare:
    """Mix a block square by random 2x2 switches, which keep all line sums."""
    if n % 2:
        raise ValueError("binary squares need even order")
    g = block_square(n)
    for _ in range(sweeps * n * n):
        r1, r2 = rng.choice(n, 2, replace=False)
        c1, c2 = rng.choice(n, 2, replace=False)
        a, b, c, d = g[r1, c1], g[r1, c2], g[r2, c1], g[r2, c2]
        if a == d and b == c and a != b:
            g[r1, c1], g[r1, c2], g[r2, c1], g[r2, c2] = b, a, d, c
    return FrequencySquare(g[rng.permutation(n)][:, rng.permutation(n)], 2)


_BINARY_BASES = {4: (2, 2), 8: (2, 3), 16: (2, 4)}


@lru_cache(maxsize=None)
def binary_mofs_source(n: int) -> MofsSet:
    """A set of binary MOFS of order n from a complete set, dilated if needed."""
    for base in sorted(_BINARY_BASES, reverse=True):
        if n % base == 0:
            q, h = _BINARY_BASES[base]
            return dilate(complete_mofs_prime_power(q, h), n // base)
    raise ValueError(f"no binary source for order {n}")


def random_isomorph(mofs: MofsSet, rng: np.random.Generator) -> MofsSet:
    out = apply_isomorphism(mofs, "rows", rng.permutation(mofs.n))
    out = apply_isomorphism(out, "columns", rng.permutation(mofs.n))
    if rng.random() < 0.5:
        out = apply_isomorphism(out, "transpose")
    for t in range(out.k):
        if rng.random() < 0.5:
            out = apply_isomorphism(out, "symbols", rng.permutation(out.m), square=t)
    return out


def random_orthogonal_binary_pair(n: int, rng: np.random.Generator) -> MofsSet:
    source = binary_mofs_source(n)
    i, j = rng.choice(source.k, 2, replace=False)
    return random_isomorph(MofsSet([source[int(i)], source[int(j)]]), rng)


def random_admissible(m: int, rng: np.random.Generator, tries: int = 1000) -> np.ndarray:
    """A random 3x3 matrix with entry sum 2m and the forced row/column relations."""
    for _ in range(tries):
        a31, a32, a33, a13, a23 = (int(v) for v in rng.integers(0, m + 1, size=5))
        r3, c3 = a31 + a32 + a33, a13 + a23 + a33
        if r3 % 2 or c3 % 2:
            continue
        R, C = m - r3 // 2, m - c3 // 2
        lo = max(0, a23 + C - R - a31)
        hi = min(R - a13, C - a31)
        if R < 0 or C < 0 or lo > hi:
            continue
        a11 = int(rng.integers(lo, hi + 1))
        a12, a21 = R - a13 - a11, C - a31 - a11
        a22 = R - a23 - a21
        A = np.array([[a11, a12, a13], [a21, a22, a23], [a31, a32, a33]])
        if A.min() >= 0:
            return A
    raise RuntimeError("could not sample an admissible matrix")


def admissible_matrices(m: int):
    """Every admissible 3x3 matrix for n = 2m."""
    for a33 in range(2 * m + 1):
        for a31 in range(2 * m + 1 - a33):
            for a32 in range(2 * m + 1 - a33 - a31):
                r3 = a31 + a32 + a33
                if r3 % 2:
                    continue
                for a13 in range(2 * m + 1):
                    for a23 in range(2 * m + 1):
                        c3 = a13 + a23 + a33
                        if c3 % 2:
                            continue
                        R, C = m - r3 // 2, m - c3 // 2
                        if R < 0 or C < 0:
                            continue
                        for a11 in range(2 * m + 1):
                            a12, a21 = R - a13 - a11, C - a31 - a11
                            a22 = R - a23 - a21
                            if min(a12, a21, a22) < 0:
                                continue
                            yield np.array([[a11, a12, a13], [a21, a22, a23], [a31, a32, a33]])
