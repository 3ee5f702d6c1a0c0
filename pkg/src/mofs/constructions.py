"""Complete sets over prime powers, dilation, and the explicit extensions.

The complete set of type (q^h; q^(h-1)) comes from linear forms over
GF(q^h): square (a, b) sends cell (x, y) to Tr(a*x + b*y), where Tr is the
relative trace down to the subfield GF(q).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra_rank import hrs_bound
from .core import FrequencySquare, MofsSet, SquareError, are_orthogonal, validate_mofs
from .fields import factor_prime_power, gf

COMPLETE_ORDER_LIMIT = 64


class ConstructionError(ValueError):
    """Raised when a construction's preconditions fail or its output fails verification."""


def _subfield_labels(F, q: int) -> dict[int, int]:
    """Map the codes of the q elements fixed by z -> z^q to labels 0..q-1."""
    fixed = [z for z in range(F.order) if F.power(z, q) == z]
    if len(fixed) != q:
        raise ConstructionError(f"expected {q} subfield elements, found {len(fixed)}")
    return {z: i for i, z in enumerate(sorted(fixed))}


def _trace_table(F, q: int, h: int) -> np.ndarray:
    """Relative trace GF(q^h) -> GF(q) for every element, as subfield labels."""
    labels = _subfield_labels(F, q)
    out = np.empty(F.order, dtype=np.int64)
    for z in range(F.order):
        acc, conj = 0, z
        for _ in range(h):
            acc = int(F.add[acc, conj])
            conj = F.power(conj, q)
        out[z] = labels[acc]
    return out


def complete_mofs_prime_power(q: int, h: int, limit: int = COMPLETE_ORDER_LIMIT) -> MofsSet:
    """A complete set of (q^h-1)^2/(q-1) MOFS of type (q^h; q^(h-1)).

    Every square and every pair is verified before returning.
    """
    pu = factor_prime_power(q)
    if pu is None:
        raise ConstructionError(f"{q} is not a prime power")
    if h < 1:
        raise ConstructionError("h must be positive")
    n = q ** h
    if n > limit:
        raise ConstructionError(f"order {n} exceeds the size bound {limit}")
    p, u = pu
    F = gf(p, u * h)
    tr = _trace_table(F, q, h)
    scalars = sorted(_subfield_labels(F, q))[1:]  # nonzero subfield codes

    seen: set[tuple[int, int]] = set()
    squares = []
    for a in range(1, n):
        for b in range(1, n):
            if (a, b) in seen:
                continue
            seen.update((int(F.mul[c, a]), int(F.mul[c, b])) for c in scalars)
            # cell (x, y) -> Tr(a x + b y)
            lin = F.add[F.mul[a][:, None], F.mul[b][None, :]]
            squares.append(FrequencySquare(tr[lin], q))
    out = MofsSet(squares, n, q)
    expected = (n - 1) ** 2 // (q - 1)
    if out.k != expected:
        raise ConstructionError(f"built {out.k} squares, expected {expected}")
    report = validate_mofs(out)
    if not report.ok:
        raise ConstructionError("complete set failed verification: " + "; ".join(report.lines()[:3]))
    return out


def dilate(mofs: MofsSet, d: int) -> MofsSet:
    """Replace every entry by a constant d x d block."""
    if d < 1:
        raise ValueError("dilation factor must be positive")
    block = np.ones((d, d), dtype=np.int64)
    return MofsSet((FrequencySquare(np.kron(s.grid, block), mofs.m, validate=False)
                    for s in mofs), mofs.n * d, mofs.m)


def circulant(d: int, counts) -> np.ndarray:
    """d x d circulant whose first row lists symbol s counts[s] times, rows rotating right."""
    first = np.repeat(np.arange(len(counts)), counts)
    if first.size != d:
        raise ValueError("counts must sum to d")
    return np.array([np.roll(first, r) for r in range(d)], dtype=np.int64)


def is_block_structured(mofs: MofsSet, d: int) -> bool:
    if mofs.n % d:
        return False
    for s in mofs:
        g = s.grid
        if not (g == np.kron(g[::d, ::d], np.ones((d, d), dtype=np.int64))).all():
            return False
    return True


def circulant_extension(dilated: MofsSet, d: int) -> FrequencySquare:
    """A square orthogonal to every member of a d-dilated set, for m | d.

    Each d x d block is a copy of one circulant frequency square of order d.
    """
    m = dilated.m
    if d % m:
        raise ConstructionError(f"symbol count {m} does not divide d = {d}")
    if not is_block_structured(dilated, d):
        raise ConstructionError(f"input is not made of constant {d}x{d} blocks")
    base = circulant(d, [d // m] * m)
    blocks = dilated.n // d
    F = FrequencySquare(np.kron(np.ones((blocks, blocks), dtype=np.int64), base), m)
    for i, s in enumerate(dilated):
        if not are_orthogonal(F, s):
            raise ConstructionError(f"extension not orthogonal to square {i}")
    return F


def lift_blocks(X, d: int) -> FrequencySquare:
    """Binary square of order d*n replacing entry c by a circulant block with c ones per line."""
    X = np.asarray(X, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise SquareError("X must be square")
    n = X.shape[0]
    if X.min() < 0 or X.max() > d:
        r, c = np.argwhere((X < 0) | (X > d))[0]
        raise SquareError(f"entry {X[r, c]} at ({r},{c}) outside 0..{d}", int(r), int(c))
    target = Fraction(d * n, 2)
    for r, total in enumerate(X.sum(axis=1)):
        if total != target:
            raise SquareError(f"row {r} of X sums to {total}, expected {target}", row=r)
    for c, total in enumerate(X.sum(axis=0)):
        if total != target:
            raise SquareError(f"column {c} of X sums to {total}, expected {target}", column=c)
    blocks = [[_ones_block(d, int(c)) for c in row] for row in X]
    return FrequencySquare(np.block(blocks), 2)


def _ones_block(d: int, c: int) -> np.ndarray:
    first = np.zeros(d, dtype=np.int64)
    first[:c] = 1
    return np.array([np.roll(first, r) for r in range(d)])


class Verdict(enum.Enum):
    MAXIMAL_BY_COMPLETENESS = "MaximalByCompleteness"
    MAXIMAL_BY_RELATION = "MaximalByRelation"
    NOT_MAXIMAL_DIVISIBLE = "NotMaximalDivisible"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class DilationCertificate:
    verdict: Verdict
    d: int
    n: int
    m: int
    witness: FrequencySquare | None = None
    reason: str = ""


def dilation_certificate(mofs: MofsSet, d: int,
                         jp_relation_found: bool | None = None) -> DilationCertificate:
    """Decide what is known about maximality of the d-dilation of ``mofs``.

    ``jp_relation_found`` may be supplied; when None it is computed if the
    parity hypotheses make it relevant.
    """
    n, m = mofs.n, mofs.m
    lam = n // m
    if d % m == 0:
        witness = circulant_extension(dilate(mofs, d), d)
        return DilationCertificate(Verdict.NOT_MAXIMAL_DIVISIBLE, d, n, m, witness,
                                   f"{m} divides d, so a circulant block pattern extends the set")
    bound = hrs_bound(n, m)
    if (d * d) % m and bound.integral and mofs.k == bound.value:
        return DilationCertificate(Verdict.MAXIMAL_BY_COMPLETENESS, d, n, m,
                                   reason=f"set is complete ({mofs.k} squares) and d^2 is not "
                                          f"divisible by {m}")
    if d % 2 and lam % 2:
        if jp_relation_found is None:
            from .relations import find_jp_relations
            jp_relation_found = bool(find_jp_relations(mofs, limit=1).relations)
        if jp_relation_found:
            return DilationCertificate(Verdict.MAXIMAL_BY_RELATION, d, n, m,
                                       reason="d and the frequency are odd and a "
                                              "Jedwab-Popatia relation holds")
    return DilationCertificate(Verdict.UNKNOWN, d, n, m, reason="no criterion applies")


def prime_power_dilation_parameters(n: int, q: int, h: int) -> bool:
    """Whether the complete set of order q^h dilated to order n is certified maximal.

    With q = p^u and p^v exactly dividing n, this holds when n is a multiple
    of q^h and 0 <= v - u*h < u/2.
    """
    pu = factor_prime_power(q)
    if pu is None or n % (q ** h):
        return False
    p, u = pu
    v, r = 0, n
    while r % p == 0:
        r //= p
        v += 1
    return 0 <= v - u * h and 2 * (v - u * h) < u


def maximal_dilated_complete_set(n: int, q: int, h: int) -> MofsSet:
    """Dilate the complete set of order q^h up to order n when that is certified maximal."""
    if not prime_power_dilation_parameters(n, q, h):
        raise ConstructionError(f"parameters n={n}, q={q}, h={h} are not covered")
    base = complete_mofs_prime_power(q, h, limit=max(COMPLETE_ORDER_LIMIT, q ** h))
    return dilate(base, n // q ** h)
