"""Small finite fields GF(p^k) as integer-indexed lookup tables.

Element ``e`` encodes the polynomial whose base-p digits are its
coefficients, least significant digit first (the constant term).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TABLE_LIMIT = 1 << 12
EXHAUSTIVE_LIMIT = 256


def factor_prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, u)`` with ``q = p**u`` for prime p, or None."""
    if q < 2:
        return None
    p = next(d for d in itertools.count(2) if q % d == 0)
    u, r = 0, q
    while r % p == 0:
        r //= p
        u += 1
    return (p, u) if r == 1 else None


def _digits(e: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        e, d = divmod(e, p)
        out.append(d)
    return out


def _polymod(a: list[int], b: list[int], p: int) -> list[int]:
    """Remainder of a modulo monic b, coefficient lists low-to-high."""
    a = a[:]
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] % p
        if c:
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return [x % p for x in a[:db]] if db else []


def is_irreducible(coeffs: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(coeffs) - 1
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = list(low) + [1]
            if not any(_polymod(coeffs, divisor, p)):
                return False
    return True


def smallest_irreducible(p: int, k: int) -> list[int]:
    """The monic irreducible of degree k whose integer code is least."""
    if k == 1:
        return [0, 1]
    for code in range(p ** k):
        coeffs = _digits(code, p, k) + [1]
        if coeffs[0] and is_irreducible(coeffs, p):
            return coeffs
    raise AssertionError(f"no irreducible of degree {k} over GF({p})")


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """GF(p^k) with add/mul tables over integer codes 0..p^k-1."""

    p: int
    k: int
    modulus: tuple[int, ...]
    add: np.ndarray
    mul: np.ndarray

    @property
    def order(self) -> int:
        return self.p ** self.k

    def neg(self, a: int) -> int:
        return int(np.nonzero(self.add[a] == 0)[0][0])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return int(np.nonzero(self.mul[a] == 1)[0][0])

    def power(self, a: int, e: int) -> int:
        r = 1
        for _ in range(e):
            r = int(self.mul[r, a])
        return r


def _build_tables(p: int, k: int, modulus: list[int]) -> tuple[np.ndarray, np.ndarray]:
    q = p ** k
    digits = np.array([_digits(e, p, k) for e in range(q)], dtype=np.int64)
    weights = p ** np.arange(k, dtype=np.int64)
    add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
    # x^j mod modulus for j < 2k-1, as digit vectors
    reduce_rows = []
    for j in range(2 * k - 1):
        mono = [0] * j + [1]
        reduce_rows.append(_polymod(mono, modulus, p) if j >= k else
                           [1 if i == j else 0 for i in range(k)])
    red = np.array(reduce_rows, dtype=np.int64)
    mul = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        prod = np.zeros((q, 2 * k - 1), dtype=np.int64)
        for i in range(k):
            if digits[a, i]:
                prod[:, i:i + k] += digits[a, i] * digits
        mul[a] = ((prod @ red) % p) @ weights
    return add, mul


def check_field_axioms(F: FieldSpec) -> None:
    """Check the field axioms on the tables; raises AssertionError."""
    q, add, mul = F.order, F.add, F.mul
    idx = np.arange(q)
    assert (add[0] == idx).all() and (mul[1] == idx).all(), "identities"
    assert (add == add.T).all() and (mul == mul.T).all(), "commutativity"
    assert (np.sort(add, axis=1) == idx).all(), "additive inverses"
    assert (np.sort(mul[1:, 1:], axis=1) == idx[1:]).all(), "multiplicative inverses"
    # full triple checks are cubic; above EXHAUSTIVE_LIMIT the left factor
    # runs over a basis plus 1, which suffices given the tables are built
    # from polynomial arithmetic and additivity is checked in full
    lefts = range(q) if q <= EXHAUSTIVE_LIMIT else sorted({1} | {F.p ** i for i in range(F.k)})
    for a in lefts:
        assert (add[add[a][:, None], idx[None, :]] == add[a][add]).all(), "add assoc"
        assert (mul[mul[a][:, None], idx[None, :]] == mul[a][mul]).all(), "mul assoc"
        assert (mul[a][add] == add[mul[a][:, None], mul[a][None, :]]).all(), "distributive"


@lru_cache(maxsize=None)
def gf(p: int, k: int) -> FieldSpec:
    """The field GF(p^k) built on :func:`smallest_irreducible`, axioms verified."""
    q = p ** k
    if factor_prime_power(p) != (p, 1):
        raise ValueError(f"{p} is not prime")
    if q > TABLE_LIMIT:
        raise ValueError(f"GF({p}^{k}) exceeds the table limit {TABLE_LIMIT}")
    modulus = smallest_irreducible(p, k)
    add, mul = _build_tables(p, k, modulus)
    add.setflags(write=False)
    mul.setflags(write=False)
    F = FieldSpec(p, k, tuple(modulus), add, mul)
    check_field_axioms(F)
    return F
