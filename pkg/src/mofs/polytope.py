"""The polytope P(b) = {x >= 0 : sum x = b, sum i*x_i = m*b} in R^(2m+1).

Also the lcm-based constants that drive the tower construction, and an
exact splitting of integer points of a dilate of P(b) into integer points
of P(b). All arithmetic is on Python ints and Fractions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence


class DecompositionError(ValueError):
    pass


def gamma(m: int) -> int:
    """lcm(1, ..., m); gamma(0) = 1."""
    return reduce(math.lcm, range(1, m + 1), 1)


def f(m: int) -> int:
    if m < 1:
        raise ValueError("f is defined for m >= 1")
    return 2 if m == 1 else (2 * m - 2) * gamma(2 * m - 1)


@dataclass(frozen=True)
class TowerConstants:
    m: tuple[int, ...]  # m[i-1] is m_i

    def m_i(self, i: int) -> int:
        return self.m[i - 1]


def tower_constants(i_max: int) -> TowerConstants:
    """m_1 = m_2 = 1, m_3 = 2, m_(i+1) = 2 m_i (m_i - 1) gamma(2 m_i - 1)."""
    vals = [1, 1, 2][:i_max]
    while len(vals) < i_max:
        mi = vals[-1]
        vals.append(2 * mi * (mi - 1) * gamma(2 * mi - 1))
    for ell in range(2, len(vals)):
        if vals[ell] != vals[ell - 1] * f(vals[ell - 1]):
            raise AssertionError(f"tower identity fails at index {ell}")
    return TowerConstants(tuple(vals))


def m_i(i: int) -> int:
    return tower_constants(i).m_i(i)


@dataclass(frozen=True)
class PolytopeSpec:
    m: int
    b: Fraction

    def __init__(self, m: int, b):
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "b", Fraction(b))

    @property
    def dim(self) -> int:
        return 2 * self.m + 1

    def contains(self, x: Sequence) -> bool:
        if len(x) != self.dim:
            return False
        xs = [Fraction(v) for v in x]
        return (all(v >= 0 for v in xs) and sum(xs) == self.b
                and sum(i * v for i, v in enumerate(xs)) == self.m * self.b)


def vertices(spec: PolytopeSpec) -> list[tuple[Fraction, ...]]:
    """The points v_(i,j) for i < m < j together with b*e_m."""
    m, b, d = spec.m, spec.b, spec.dim
    out = []
    for i in range(m):
        for j in range(m + 1, 2 * m + 1):
            v = [Fraction(0)] * d
            v[i] = Fraction(j - m, j - i) * b
            v[j] = Fraction(m - i, j - i) * b
            out.append(tuple(v))
    v = [Fraction(0)] * d
    v[m] = b
    out.append(tuple(v))
    for v in out:
        assert spec.contains(v)
    return out


def basic_solutions(spec: PolytopeSpec) -> set[tuple[Fraction, ...]]:
    """Nonnegative basic solutions of the two equalities, by solving every 1- or 2-column subsystem."""
    m, b, d = spec.m, spec.b, spec.dim
    rows = ([1] * d, list(range(d)))
    rhs = (b, m * b)
    out = set()
    for size in (1, 2):
        for cols in itertools.combinations(range(d), size):
            if size == 1:
                (c,) = cols
                # a single column must satisfy both equations
                if rows[0][c] and Fraction(rhs[0], rows[0][c]) * rows[1][c] == rhs[1]:
                    sol = {c: Fraction(rhs[0], rows[0][c])}
                else:
                    continue
            else:
                c1, c2 = cols
                det = rows[0][c1] * rows[1][c2] - rows[0][c2] * rows[1][c1]
                if det == 0:
                    continue
                sol = {c1: (rhs[0] * rows[1][c2] - rows[0][c2] * rhs[1]) / det,
                       c2: (rows[0][c1] * rhs[1] - rhs[0] * rows[1][c1]) / det}
            if all(v >= 0 for v in sol.values()):
                x = [Fraction(0)] * d
                for c, v in sol.items():
                    x[c] = Fraction(v)
                out.add(tuple(x))
    return out


def is_extreme_among(points: Sequence[Sequence[Fraction]]) -> bool:
    """No point is a convex combination of the others.

    For nonnegative points, a convex combination equal to v can only use
    points whose support lies inside supp(v); so it suffices that no other
    point has support contained in that of v.
    """
    supports = [frozenset(i for i, x in enumerate(p) if x) for p in points]
    for a, sa in enumerate(supports):
        if any(b != a and sb <= sa for b, sb in enumerate(supports)):
            return False
    return True


def integer_points(m: int, b: int):
    """Every integer point of P(b), in lexicographic order."""
    d = 2 * m + 1
    x = [0] * d

    def rec(i: int, count: int, weight: int):
        if i == d - 1:
            if count * i == weight:
                x[i] = count
                yield tuple(x)
            return
        for v in range(count + 1):
            rest_c, rest_w = count - v, weight - i * v
            # remaining coordinates have index in [i+1, d-1]
            if rest_c * (i + 1) <= rest_w <= rest_c * (d - 1):
                x[i] = v
                yield from rec(i + 1, rest_c, rest_w)
        x[i] = 0

    yield from rec(0, b, m * b)


def _find_piece(x: Sequence[int], m: int, size: int) -> list[int] | None:
    """An integer y <= x with sum y = size and sum i*y_i = m*size."""
    d = len(x)
    target_w = m * size
    # vertex directions first
    for i in range(m):
        for j in range(m + 1, d):
            num_i, num_j = (j - m) * size, (m - i) * size
            if num_i % (j - i) == 0 and num_j % (j - i) == 0:
                yi, yj = num_i // (j - i), num_j // (j - i)
                if yi <= x[i] and yj <= x[j]:
                    y = [0] * d
                    y[i], y[j] = yi, yj
                    return y
    if x[m] >= size:
        y = [0] * d
        y[m] = size
        return y
    # depth-first search, largest values first, with weight bounds
    y = [0] * d

    def bounds(start: int, count: int) -> tuple[int, int] | None:
        lo = hi = 0
        c = count
        for i in range(start, d):
            t = min(c, x[i])
            lo += t * i
            c -= t
        if c:
            return None
        c = count
        for i in range(d - 1, start - 1, -1):
            t = min(c, x[i])
            hi += t * i
            c -= t
        return lo, hi

    def rec(i: int, count: int, weight: int) -> bool:
        if i == d:
            return count == 0 and weight == 0
        bd = bounds(i, count)
        if bd is None or not bd[0] <= weight <= bd[1]:
            return False
        for v in range(min(x[i], count), -1, -1):
            y[i] = v
            if rec(i + 1, count - v, weight - i * v):
                return True
        y[i] = 0
        return False

    return list(y) if rec(0, size, target_w) else None


def split(x: Sequence[int], m: int, pieces: int, size: int) -> list[list[int]]:
    """Write x as a sum of ``pieces`` integer points of P(size), lexicographically stable."""
    x = [int(v) for v in x]
    if len(x) != 2 * m + 1 or min(x) < 0:
        raise DecompositionError(f"x must be a nonnegative vector of length {2 * m + 1}")
    if sum(x) != pieces * size or sum(i * v for i, v in enumerate(x)) != m * pieces * size:
        raise DecompositionError("x is not a point of the required dilate")
    out = []
    rest = x[:]
    for _ in range(pieces):
        y = _find_piece(rest, m, size)
        if y is None:
            raise DecompositionError(f"no integer piece of P({size}) fits under {rest}")
        out.append(y)
        rest = [a - b for a, b in zip(rest, y)]
    assert not any(rest)
    return out


def decompose(x: Sequence[int], m: int, beta: int) -> list[list[int]]:
    """Split x (sum 2*beta, weighted sum 2*m*beta) into 2*beta/f(m) integer points of P(f(m))."""
    fm = f(m)
    if beta <= 0 or beta % fm:
        raise DecompositionError(f"f({m}) = {fm} must divide beta = {beta}")
    x = [int(v) for v in x]
    if sum(x) != 2 * beta or sum(i * v for i, v in enumerate(x)) != 2 * m * beta:
        raise DecompositionError("x must satisfy sum x = 2 beta and sum i x_i = 2 m beta")
    return split(x, m, 2 * beta // fm, fm)
