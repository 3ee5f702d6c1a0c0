"""Balancing row pairs of two binary squares, and the resulting orthogonal mate.

For two rows of F1 + F2 (both binary of order n = 2m) the 4x4 profile counts
columns by the pattern of F1 on those rows against the pattern of F2, with
patterns ordered (0,1), (1,0), (0,0), (1,1). The condensed 3x3 profile merges
the last two patterns. A 3x3 matrix B with 0 <= B <= A, entry sum m and
prescribed row/column differences (p, q) yields a 2 x n rectangle whose
(0,0) counts against the two squares are m+p and m+q. Rows are grouped into
sets whose (p, q) values cancel, and the rectangles stack into a mate.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import networkx as nx
import numpy as np

from .core import FrequencySquare, Join, MofsSet, are_orthogonal, psi

PATTERNS = ((0, 1), (1, 0), (0, 0), (1, 1))
_PATTERN_INDEX = {v: i for i, v in enumerate(PATTERNS)}


class InadmissibleMatrix(ValueError):
    pass


class PartitionNotFound(RuntimeError):
    pass


class NotGuaranteed(RuntimeError):
    pass


# --- profiles ------------------------------------------------------------

def condense(Ap: np.ndarray) -> np.ndarray:
    Ap = np.asarray(Ap, dtype=np.int64)
    A = np.zeros((3, 3), dtype=np.int64)
    A[:2, :2] = Ap[:2, :2]
    A[:2, 2] = Ap[:2, 2] + Ap[:2, 3]
    A[2, :2] = Ap[2, :2] + Ap[3, :2]
    A[2, 2] = Ap[2:, 2:].sum()
    return A


def admissible_4x4_violations(Ap: np.ndarray) -> list[str]:
    a = np.asarray(Ap)
    out = []
    if a.min() < 0:
        out.append("negative entry")
    if a[:, 0].sum() != a[:, 1].sum():
        out.append("column sums 1 and 2 differ")
    if a[0].sum() != a[1].sum():
        out.append("row sums 1 and 2 differ")
    if a[:, 2].sum() != a[:, 3].sum():
        out.append("column sums 3 and 4 differ")
    if a[2].sum() != a[3].sum():
        out.append("row sums 3 and 4 differ")
    if a[0, 0] + a[0, 2] + a[2, 0] + a[2, 2] != a[1, 1] + a[1, 3] + a[3, 1] + a[3, 3]:
        out.append("first-row (0,0) counts disagree")
    if a[1, 1] + a[1, 2] + a[2, 1] + a[2, 2] != a[0, 0] + a[0, 3] + a[3, 0] + a[3, 3]:
        out.append("second-row (0,0) counts disagree")
    return out


def admissible_3x3_violations(A, m: int) -> list[str]:
    a = np.asarray(A, dtype=np.int64)
    out = []
    if a.shape != (3, 3):
        return ["shape must be 3x3"]
    if a.min() < 0:
        out.append("negative entry")
    if a.sum() != 2 * m:
        out.append(f"entry sum {a.sum()} != {2 * m}")
    r3, c3 = a[2].sum(), a[:, 2].sum()
    if r3 % 2 or c3 % 2:
        out.append("third row or column sum is odd")
    else:
        if not (a[0].sum() == a[1].sum() == m - r3 // 2):
            out.append("row sums 1, 2 inconsistent")
        if not (a[:, 0].sum() == a[:, 1].sum() == m - c3 // 2):
            out.append("column sums 1, 2 inconsistent")
    return out


def is_admissible(A, m: int) -> bool:
    return not admissible_3x3_violations(A, m)


@dataclass(frozen=True, eq=False)
class PairProfile:
    r1: int
    r2: int
    Aprime: np.ndarray
    A: np.ndarray
    psi1: int
    psi2: int
    m: int

    def __repr__(self) -> str:
        return f"PairProfile(r1={self.r1}, r2={self.r2}, A={self.A.tolist()})"


def _binary_arrays(join_or_pair) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(join_or_pair, Join):
        if join_or_pair.k != 2:
            raise ValueError("need a join of two binary arrays")
        return join_or_pair.arrays
    F1, F2 = join_or_pair
    g = lambda F: F.grid if isinstance(F, FrequencySquare) else np.asarray(F)
    return g(F1), g(F2)


def pair_profile(join, r1: int, r2: int) -> PairProfile:
    """Column-pattern counts for rows r1, r2 of a two-square join."""
    X, Y = _binary_arrays(join)
    n_rows, n = X.shape
    for r in (r1, r2):
        if not 0 <= r < n_rows:
            raise IndexError(f"row {r} out of range")
    if r1 == r2:
        raise ValueError("rows must differ")
    if n % 2:
        raise ValueError("binary rows need even length")
    m = n // 2
    iF1 = np.array([_PATTERN_INDEX[(int(a), int(b))] for a, b in zip(X[r1], X[r2])])
    iF2 = np.array([_PATTERN_INDEX[(int(a), int(b))] for a, b in zip(Y[r1], Y[r2])])
    Ap = np.zeros((4, 4), dtype=np.int64)
    np.add.at(Ap, (iF1, iF2), 1)
    A = condense(Ap)
    j = Join(X, Y)
    p1, p2 = psi(j, r1), psi(j, r2)
    assert Ap.sum() == n
    assert not admissible_4x4_violations(Ap), admissible_4x4_violations(Ap)
    assert p1 == Ap[0, 0] + Ap[0, 2] + Ap[2, 0] + Ap[2, 2]
    assert p2 == Ap[1, 1] + Ap[1, 2] + Ap[2, 1] + Ap[2, 2]
    assert is_admissible(A, m), admissible_3x3_violations(A, m)
    for arr in (Ap, A):
        arr.setflags(write=False)
    return PairProfile(r1, r2, Ap, A, p1, p2, m)


# --- equivalence -----------------------------------------------------------

def orbit3(A) -> list[np.ndarray]:
    """Images of A under row swap (1 2), column swap (1 2) and transpose, deduplicated."""
    A = np.asarray(A, dtype=np.int64)
    sw = [1, 0, 2]
    seen, out = set(), []
    for t, rs, cs in itertools.product((False, True), repeat=3):
        B = A.T if t else A
        B = B[sw] if rs else B
        B = B[:, sw] if cs else B
        key = tuple(B.ravel())
        if key not in seen:
            seen.add(key)
            out.append(B.copy())
    return out


def orbit4(Ap) -> list[np.ndarray]:
    """Images of A' under (12)(34) on rows, on columns, (12) on both, and transpose."""
    Ap = np.asarray(Ap, dtype=np.int64)
    dual = [1, 0, 3, 2]
    swap = [1, 0, 2, 3]
    seen, out = set(), []
    for t, a, b, c in itertools.product((False, True), repeat=4):
        B = Ap.T if t else Ap
        B = B[dual] if a else B
        B = B[:, dual] if b else B
        B = B[swap][:, swap] if c else B
        key = tuple(B.ravel())
        if key not in seen:
            seen.add(key)
            out.append(B.copy())
    return out


def canonicalize(A, m: int | None = None) -> tuple[np.ndarray, list[np.ndarray]]:
    """Lexicographically least orbit member and the whole orbit."""
    A = np.asarray(A, dtype=np.int64)
    if A.shape == (4, 4):
        orb = orbit4(A)
    else:
        if m is None:
            m = int(A.sum()) // 2
        if not is_admissible(A, m):
            raise InadmissibleMatrix("; ".join(admissible_3x3_violations(A, m)))
        orb = orbit3(A)
    rep = min(orb, key=lambda B: tuple(B.ravel()))
    return rep, orb


# --- exceptions ------------------------------------------------------------

def exception_templates(n: int) -> dict[str, np.ndarray]:
    """The non-balanceable templates that apply at order n."""
    x, y = n // 6, n // 8
    out = {}
    if n % 6 == 2:
        out["E1"] = np.array([[2 * x, 0, 1], [0, 0, 2 * x + 1], [0, 2 * x, 0]])
        out["E2"] = np.array([[2 * x + 1, 0, 0], [0, 1, 2 * x], [0, 2 * x, 0]])
    if n % 6 == 4:
        out["E3"] = np.array([[2 * x + 1, 0, 0], [1, 0, 2 * x], [0, 2 * x + 2, 0]])
        out["E4"] = np.array([[2 * x + 1, 0, 0], [0, 0, 2 * x + 1], [0, 2 * x + 1, 1]])
    if n % 8 == 4:
        out["E5"] = np.array([[2 * y + 1, 0, 0], [2 * y + 1, 0, 0], [0, 4 * y + 2, 0]])
        out["E6"] = np.array([[2 * y + 1, 0, 0], [2 * y, 0, 1], [0, 4 * y + 1, 1]])
    return out


def all_exception_templates(x: int, y: int) -> dict[str, np.ndarray]:
    """All six templates for given x and y, ignoring residue conditions."""
    return {
        "E1": np.array([[2 * x, 0, 1], [0, 0, 2 * x + 1], [0, 2 * x, 0]]),
        "E2": np.array([[2 * x + 1, 0, 0], [0, 1, 2 * x], [0, 2 * x, 0]]),
        "E3": np.array([[2 * x + 1, 0, 0], [1, 0, 2 * x], [0, 2 * x + 2, 0]]),
        "E4": np.array([[2 * x + 1, 0, 0], [0, 0, 2 * x + 1], [0, 2 * x + 1, 1]]),
        "E5": np.array([[2 * y + 1, 0, 0], [2 * y + 1, 0, 0], [0, 4 * y + 2, 0]]),
        "E6": np.array([[2 * y + 1, 0, 0], [2 * y, 0, 1], [0, 4 * y + 1, 1]]),
    }


def classify_exception(A, n: int) -> str | None:
    """Label E1..E6 if A is equivalent to a template applicable at order n."""
    A = np.asarray(A, dtype=np.int64)
    if not is_admissible(A, n // 2):
        raise InadmissibleMatrix("; ".join(admissible_3x3_violations(A, n // 2)))
    keys = {tuple(B.ravel()) for B in orbit3(A)}
    for label, T in exception_templates(n).items():
        if tuple(T.ravel()) in keys:
            return label
    return None


# --- balancing -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BalanceWitness:
    B: np.ndarray
    p: int
    q: int
    A: np.ndarray
    m: int

    def __repr__(self) -> str:
        return f"BalanceWitness(p={self.p}, q={self.q}, B={self.B.tolist()})"


def witness_violations(A, B, m: int, p: int, q: int) -> list[str]:
    A, B = np.asarray(A), np.asarray(B)
    out = []
    if B.sum() != m:
        out.append(f"entry sum {B.sum()} != {m}")
    if B[0].sum() - B[1].sum() != p:
        out.append("row difference != p")
    if B[:, 0].sum() - B[:, 1].sum() != q:
        out.append("column difference != q")
    if (B < 0).any() or (B > A).any():
        out.append("entries outside [0, A]")
    return out


_EFFECT = [(1, 1 if i == 0 else -1 if i == 1 else 0, 1 if j == 0 else -1 if j == 1 else 0)
           for i in range(3) for j in range(3)]


@lru_cache(maxsize=200_000)
def _balance_cached(A: tuple[int, ...], m: int, p: int, q: int) -> tuple[int, ...] | None:
    if abs(p) > m or abs(q) > m:
        return None
    size = 2 * m + 1
    # reach[k][s, dp+m, dq+m]: cells k..8 can contribute exactly (s, dp, dq)
    reach = [None] * 10
    base = np.zeros((m + 1, size, size), dtype=bool)
    base[0, m, m] = True
    reach[9] = base
    for k in range(8, -1, -1):
        ds, dp, dq = _EFFECT[k]
        nxt = reach[k + 1]
        cur = nxt.copy()
        for b in range(1, min(A[k], m) + 1):
            sh = np.zeros_like(nxt)
            s0 = b * ds
            src = nxt[: m + 1 - s0]
            src = np.roll(np.roll(src, b * dp, axis=1), b * dq, axis=2)
            # roll wraps; clear the wrapped bands
            if b * dp > 0:
                src[:, : b * dp] = False
            elif b * dp < 0:
                src[:, b * dp:] = False
            if b * dq > 0:
                src[:, :, : b * dq] = False
            elif b * dq < 0:
                src[:, :, b * dq:] = False
            sh[s0:] = src
            cur |= sh
        reach[k] = cur
    if not reach[0][m, p + m, q + m]:
        return None
    s, dp_, dq_ = m, p, q
    out = []
    for k in range(9):
        ds, ep, eq = _EFFECT[k]
        for b in range(0, min(A[k], m) + 1):
            rs, rp, rq = s - b * ds, dp_ - b * ep, dq_ - b * eq
            if rs < 0:
                break
            if -m <= rp <= m and -m <= rq <= m and reach[k + 1][rs, rp + m, rq + m]:
                out.append(b)
                s, dp_, dq_ = rs, rp, rq
                break
        else:
            raise AssertionError("reachability table inconsistent")
    return tuple(out)


def find_balancer(A, m: int, p: int = 0, q: int = 0) -> BalanceWitness | None:
    """Lexicographically least B that (p, q)-balances A, or None if none exists.

    Exact: a reachability table over (entry sum, row difference, column
    difference) is built for the cells in reverse order, then the witness
    is read off greedily.
    """
    A = np.asarray(A, dtype=np.int64)
    if A.shape != (3, 3) or A.min() < 0:
        raise InadmissibleMatrix("A must be a nonnegative 3x3 matrix")
    res = _balance_cached(tuple(int(v) for v in A.ravel()), int(m), int(p), int(q))
    if res is None:
        return None
    B = np.array(res, dtype=np.int64).reshape(3, 3)
    bad = witness_violations(A, B, m, p, q)
    if bad:
        raise AssertionError(f"solver produced an invalid witness: {bad}")
    B.setflags(write=False)
    return BalanceWitness(B, p, q, A, m)


def achievable_shifts(A, m: int, radius: int = 2) -> frozenset[tuple[int, int]]:
    """All (p, q) with |p|, |q| <= radius for which A is (p, q)-balanceable."""
    return frozenset((p, q) for p in range(-radius, radius + 1) for q in range(-radius, radius + 1)
                     if find_balancer(A, m, p, q) is not None)


def build_rectangle(F1, F2, r1: int, r2: int, witness: BalanceWitness) -> np.ndarray:
    """The 2 x n rectangle realizing a witness on rows r1, r2.

    Within each condensed pattern class, the first B[i, j] columns (ascending)
    get 0 over 1; all other columns get 1 over 0.
    """
    X, Y = _binary_arrays((F1, F2))
    prof = pair_profile(Join(X, Y), r1, r2)
    if not np.array_equal(prof.A, witness.A) or prof.m != witness.m:
        raise ValueError("witness was computed for a different profile")
    n = X.shape[1]
    cls = lambda i: min(i, 2)
    R = np.zeros((2, n), dtype=np.int64)
    R[0] = 1
    used = Counter()
    B = witness.B
    for c in range(n):
        i = cls(_PATTERN_INDEX[(int(X[r1, c]), int(X[r2, c]))])
        j = cls(_PATTERN_INDEX[(int(Y[r1, c]), int(Y[r2, c]))])
        if used[i, j] < B[i, j]:
            used[i, j] += 1
            R[0, c] = 0
    R[1] = 1 - R[0]
    m = n // 2
    for G, target in ((X, m + witness.p), (Y, m + witness.q)):
        zeros = int(((G[[r1, r2]] == 0) & (R == 0)).sum())
        if zeros != target:
            raise AssertionError(f"rectangle has {zeros} (0,0) cells, expected {target}")
    return R


# --- row types -------------------------------------------------------------

def t_templates(y: int) -> dict[str, np.ndarray]:
    """T1..T4, the four members of the E5 orbit."""
    T1 = np.array([[2 * y + 1, 0, 0], [2 * y + 1, 0, 0], [0, 4 * y + 2, 0]])
    T2 = T1[:, [1, 0, 2]]
    return {"T1": T1, "T2": T2, "T3": T1.T.copy(), "T4": T2.T.copy()}


def t_star_members(y: int) -> dict[str, list[np.ndarray]]:
    """E6-orbit members grouped by the T_i they differ from in exactly four entries."""
    base = t_templates(y)
    E6 = np.array([[2 * y + 1, 0, 0], [2 * y, 0, 1], [0, 4 * y + 1, 1]])
    out: dict[str, list[np.ndarray]] = {f"T{i}*": [] for i in range(1, 5)}
    for M in sorted(orbit3(E6), key=lambda B: tuple(B.ravel())):
        for i in range(1, 5):
            if int((M != base[f"T{i}"]).sum()) == 4:
                out[f"T{i}*"].append(M)
                break
    return out


def t_label(A, y: int) -> str | None:
    """T-type of a condensed profile taken as (reference row, other row)."""
    A = np.asarray(A)
    for label, T in t_templates(y).items():
        if np.array_equal(A, T):
            return label
    for label, members in t_star_members(y).items():
        if any(np.array_equal(A, M) for M in members):
            return label
    return None


def swap_columns(join, r: int, r2: int, label: str) -> tuple[int, int] | None:
    """For a T*-type pair, the two columns where both rows share the relevant entry.

    For T1*/T2* that is the F2 entry, for T3*/T4* the F1 entry.
    """
    X, Y = _binary_arrays(join)
    G = Y if label in ("T1*", "T2*") else X
    cols = np.nonzero(G[r] == G[r2])[0]
    return (int(cols[0]), int(cols[1])) if len(cols) == 2 else None


def legitimate_swap(join, row: int, c1: int, c2: int, on: str = "F2") -> tuple[np.ndarray, np.ndarray]:
    """Exchange the ``on`` entries of cells (row, c1) and (row, c2) when they differ.

    Returns new copies of the two arrays.
    """
    X, Y = (a.copy() for a in _binary_arrays(join))
    G = Y if on == "F2" else X
    if G[row, c1] == G[row, c2]:
        raise ValueError("a legitimate swap needs complementary entries")
    G[row, c1], G[row, c2] = G[row, c2], G[row, c1]
    return X, Y


@dataclass
class RowTypeTable:
    n: int
    x: int
    y: int
    pair_labels: dict[tuple[int, int], str] = field(default_factory=dict)
    row_tags: dict[int, set[str]] = field(default_factory=dict)
    t_labels: dict[tuple[int, int], str] = field(default_factory=dict)
    psi: list[int] = field(default_factory=list)
    anomalies: list[str] = field(default_factory=list)


def _alpha_beta_subtype(kind: str, ms: tuple[int, int], x: int) -> str | None:
    table = {
        "alpha": {(2 * x, 2 * x + 1): "alpha1", (2 * x + 1, 2 * x + 1): "alpha1",
                  (x, x + 1): "alpha2", (x, x): "alpha2"},
        "beta": {(2 * x + 1, 2 * x + 1): "beta1", (2 * x + 1, 2 * x + 2): "beta1",
                 (x + 1, x + 1): "beta2", (x, x + 1): "beta2"},
    }
    return table[kind].get(tuple(sorted(ms)))


def classify_row_types(join) -> RowTypeTable:
    X, Y = _binary_arrays(join)
    n = X.shape[0]
    if n < 8 or n % 4 or X.shape != (n, n):
        raise ValueError("row-type classification needs square arrays of order n >= 8, 4 | n")
    x, y = n // 6, n // 8
    jn = Join(X, Y)
    tab = RowTypeTable(n, x, y, psi=[psi(jn, r) for r in range(n)])
    tab.row_tags = {r: set() for r in range(n)}
    for r1, r2 in itertools.combinations(range(n), 2):
        prof = pair_profile(jn, r1, r2)
        label = classify_exception(prof.A, n)
        if label is None:
            continue
        tab.pair_labels[(r1, r2)] = label
        ms = (prof.psi1, prof.psi2)
        if label in ("E1", "E2", "E3", "E4"):
            kind = "alpha" if label in ("E1", "E2") else "beta"
            sub = _alpha_beta_subtype(kind, ms, x)
            if sub is None:
                tab.anomalies.append(f"pair {r1},{r2}: psi {ms} unexpected for {kind}")
                continue
            tab.row_tags[r1].add(sub)
            tab.row_tags[r2].add(sub)
        else:
            for r, other in ((r1, r2), (r2, r1)):
                tab.row_tags[r].add("gamma1" if tab.psi[r] == 2 * y + 1 else "gamma2")
                if tab.psi[r] == 2 * y + 1:
                    A = prof.A if r == r1 else _swap_profile(prof.A)
                    t = t_label(A, y)
                    if t is not None:
                        tab.t_labels[(r, other)] = t
    return tab


def _swap_profile(A: np.ndarray) -> np.ndarray:
    """Profile of (r2, r1) from that of (r1, r2): swap classes 1 and 2 on both axes."""
    sw = [1, 0, 2]
    return np.asarray(A)[sw][:, sw]


# --- partition and mate ----------------------------------------------------

@dataclass
class PairAssignment:
    rows: tuple[int, int]
    witness: BalanceWitness


@dataclass
class RowGroup:
    pairs: list[PairAssignment]

    @property
    def rows(self) -> tuple[int, ...]:
        return tuple(r for pa in self.pairs for r in pa.rows)


class _PartitionEngine:
    def __init__(self, X: np.ndarray, Y: np.ndarray):
        self.X, self.Y = X, Y
        self.n = X.shape[0]
        self.m = X.shape[1] // 2
        self.join = Join(X, Y)
        self._prof: dict[tuple[int, int], np.ndarray] = {}

    def A(self, r1: int, r2: int) -> np.ndarray:
        key = (r1, r2)
        if key not in self._prof:
            self._prof[key] = pair_profile(self.join, r1, r2).A
        return self._prof[key]

    def balanceable(self, r1: int, r2: int) -> bool:
        return find_balancer(self.A(r1, r2), self.m, 0, 0) is not None

    def shifts(self, pair: tuple[int, int]) -> frozenset[tuple[int, int]]:
        return achievable_shifts(self.A(*pair), self.m)

    def zero_sum(self, pairs: list[tuple[int, int]]) -> list[tuple[int, int]] | None:
        """Pick one achievable shift per pair with total (0, 0), or None."""
        options = [sorted(self.shifts(pr)) for pr in pairs]
        if any(not o for o in options):
            return None
        # forward DP over partial sums with back-pointers
        layers = [{(0, 0): None}]
        for opts in options:
            nxt = {}
            for s in layers[-1]:
                for v in opts:
                    t = (s[0] + v[0], s[1] + v[1])
                    if t not in nxt:
                        nxt[t] = (s, v)
            layers.append(nxt)
        if (0, 0) not in layers[-1]:
            return None
        out, s = [], (0, 0)
        for i in range(len(pairs), 0, -1):
            prev, v = layers[i][s]
            out.append(v)
            s = prev
        return out[::-1]

    def groups_from(self, pairs: list[tuple[int, int]], shifts) -> list[RowGroup]:
        zero, single = [], []
        for pr, v in zip(pairs, shifts):
            w = find_balancer(self.A(*pr), self.m, *v)
            assert w is not None
            (zero if v == (0, 0) else single).append(PairAssignment(pr, w))
        groups = [RowGroup([pa]) for pa in zero]
        if single:
            groups.append(RowGroup(single))
        return groups

    def solve(self) -> list[RowGroup]:
        n = self.n
        G = nx.Graph()
        G.add_nodes_from(range(n))
        for r1, r2 in itertools.combinations(range(n), 2):
            if self.balanceable(r1, r2):
                G.add_edge(r1, r2)
        matching = nx.max_weight_matching(G, maxcardinality=True)
        pairs = sorted(tuple(sorted(e)) for e in matching)
        matched = {r for pr in pairs for r in pr}
        left = [r for r in range(n) if r not in matched]
        bad = [(left[i], left[i + 1]) for i in range(0, len(left), 2)]
        if not bad:
            return self.groups_from(pairs, [(0, 0)] * len(pairs))
        attempt = self._with_repairs(pairs, bad)
        if attempt is not None:
            return attempt
        if n <= 10:
            attempt = self._exhaustive()
            if attempt is not None:
                return attempt
        raise PartitionNotFound(f"no balanceable row partition found for n={n}")

    def _try(self, pairs: list[tuple[int, int]]) -> list[RowGroup] | None:
        shifts = self.zero_sum(pairs)
        if shifts is None:
            return None
        return self.groups_from(pairs, shifts)

    def _with_repairs(self, good, bad):
        base = sorted(good + bad)
        res = self._try(base)
        if res is not None:
            return res
        # re-pair two or three pairs at a time, at least one of them unbalanced
        for size in (2, 3):
            for combo in itertools.combinations(range(len(base)), size):
                if not any(base[i] in bad for i in combo):
                    continue
                rows = [r for i in combo for r in base[i]]
                rest = [base[i] for i in range(len(base)) if i not in combo]
                for repair in _pairings(rows):
                    if sorted(repair) == sorted(base[i] for i in combo):
                        continue
                    res = self._try(sorted(rest + repair))
                    if res is not None:
                        return res
        return self._subset_fallback()

    def _subset_fallback(self):
        """A 4- or 6-row zero-sum group whose complement has a perfect balanceable matching."""
        n = self.n
        G = nx.Graph()
        for r1, r2 in itertools.combinations(range(n), 2):
            if self.balanceable(r1, r2):
                G.add_edge(r1, r2)
        for size in (4, 6):
            for S in itertools.combinations(range(n), size):
                rest = [r for r in range(n) if r not in S]
                H = G.subgraph(rest)
                M = nx.max_weight_matching(H, maxcardinality=True)
                if 2 * len(M) != len(rest):
                    continue
                for pairing in _pairings(list(S)):
                    shifts = self.zero_sum(pairing)
                    if shifts is None:
                        continue
                    rest_pairs = sorted(tuple(sorted(e)) for e in M)
                    groups = self.groups_from(rest_pairs, [(0, 0)] * len(rest_pairs))
                    return groups + self.groups_from(pairing, shifts)
        return None

    def _exhaustive(self):
        for pairing in _pairings(list(range(self.n))):
            res = self._try(pairing)
            if res is not None:
                return res
        return None


def _pairings(rows: list[int]):
    if not rows:
        yield []
        return
    a = rows[0]
    for i in range(1, len(rows)):
        rest = rows[1:i] + rows[i + 1:]
        for tail in _pairings(rest):
            yield [(a, rows[i])] + tail


def partition_rows(F1, F2) -> list[RowGroup]:
    """Split the rows into groups whose balance shifts cancel, with witnesses."""
    X, Y = _binary_arrays((F1, F2))
    n = X.shape[0]
    if X.shape != (n, n) or Y.shape != (n, n) or n % 2:
        raise ValueError("need two binary squares of the same even order")
    return _PartitionEngine(X, Y).solve()


def assemble_mate(F1, F2, groups: list[RowGroup]) -> FrequencySquare:
    X, Y = _binary_arrays((F1, F2))
    n = X.shape[0]
    out = np.full((n, n), -1, dtype=np.int64)
    for g in groups:
        sp = sum(pa.witness.p for pa in g.pairs)
        sq = sum(pa.witness.q for pa in g.pairs)
        if sp or sq:
            raise AssertionError("group shifts do not cancel")
        for pa in g.pairs:
            r1, r2 = pa.rows
            R = build_rectangle(X, Y, r1, r2, pa.witness)
            out[r1], out[r2] = R[0], R[1]
    if (out < 0).any():
        raise AssertionError("partition does not cover every row")
    return FrequencySquare(out, 2)


def find_binary_mate(F1, F2, budget=None) -> FrequencySquare:
    """A binary square orthogonal to both F1 and F2.

    For n divisible by 4 the balancing construction is used. Otherwise the
    same construction is attempted, then exhaustive search; if neither
    produces a mate :class:`NotGuaranteed` is raised.
    """
    X, Y = _binary_arrays((F1, F2))
    n = X.shape[0]
    S1, S2 = FrequencySquare(X, 2), FrequencySquare(Y, 2)
    try:
        F = assemble_mate(X, Y, partition_rows(X, Y))
    except PartitionNotFound:
        if n % 4 == 0:
            raise
        from .exact_search import Status, find_mate
        res = find_mate(MofsSet([S1, S2]), budget)
        if res.status is not Status.FOUND:
            raise NotGuaranteed(f"order {n} is 2 mod 4 and exhaustive search gave "
                                f"{res.status.value}") from None
        F = res.witness
    for G in (S1, S2):
        if not are_orthogonal(F, G):
            raise AssertionError("assembled mate is not orthogonal")
    return F
