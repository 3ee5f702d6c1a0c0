"""Frequency squares, sets of them, joins, and the basic predicates.

Symbols are the integers ``0..m-1``; rows and columns are indexed from 0.
Grids are stored as read-only ``int64`` numpy arrays so that every value
object is immutable after construction.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class SquareError(ValueError):
    """A grid is malformed or violates the frequency-square invariants."""

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class TypeMismatch(ValueError):
    """Two squares do not share the same order and symbol count."""


def _frozen(grid) -> np.ndarray:
    arr = np.array(grid, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def check_grid(grid, m: int | None = None) -> tuple[int, int]:
    """Validate ``grid`` as a frequency square of type (n; n/m).

    Returns ``(n, m)``. If ``m`` is omitted it is inferred as
    ``max(symbol) + 1``. Raises :class:`SquareError` naming the first
    offending row or column.
    """
    arr = np.asarray(grid)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise SquareError(f"grid must be a non-empty square array, got shape {arr.shape}")
    n = arr.shape[0]
    if m is None:
        m = int(arr.max()) + 1
    if m < 1 or n % m:
        raise SquareError(f"symbol count {m} does not divide order {n}")
    if arr.min() < 0 or arr.max() >= m:
        r, c = np.argwhere((arr < 0) | (arr >= m))[0]
        raise SquareError(f"symbol {arr[r, c]} at row {r}, column {c} outside 0..{m - 1}",
                          row=int(r), column=int(c))
    lam = n // m
    for r in range(n):
        counts = np.bincount(arr[r], minlength=m)
        bad = np.nonzero(counts != lam)[0]
        if bad.size:
            s = int(bad[0])
            raise SquareError(f"row {r} has symbol {s} {counts[s]} times, expected {lam}", row=r)
    for c in range(n):
        counts = np.bincount(arr[:, c], minlength=m)
        bad = np.nonzero(counts != lam)[0]
        if bad.size:
            s = int(bad[0])
            raise SquareError(f"column {c} has symbol {s} {counts[s]} times, expected {lam}",
                              column=c)
    return n, m


@dataclass(frozen=True, eq=False)
class FrequencySquare:
    """An n x n grid over ``m`` symbols, each symbol ``n/m`` times per row and column."""

    grid: np.ndarray
    m: int

    def __init__(self, grid, m: int | None = None, *, validate: bool = True):
        arr = _frozen(grid)
        if validate:
            _, m = check_grid(arr, m)
        elif m is None:
            m = int(arr.max()) + 1
        object.__setattr__(self, "grid", arr)
        object.__setattr__(self, "m", int(m))

    @property
    def n(self) -> int:
        return self.grid.shape[0]

    @property
    def lam(self) -> int:
        return self.n // self.m

    @property
    def is_binary(self) -> bool:
        return self.m == 2

    def row_masks(self, symbol: int = 1) -> tuple[int, ...]:
        """Per-row bitmask of the columns holding ``symbol`` (bit c = column c)."""
        weights = 1 << np.arange(self.n, dtype=object)
        return tuple(int((weights * (row == symbol)).sum()) for row in self.grid)

    def transpose(self) -> "FrequencySquare":
        return FrequencySquare(self.grid.T, self.m, validate=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrequencySquare):
            return NotImplemented
        return self.m == other.m and np.array_equal(self.grid, other.grid)

    def __hash__(self) -> int:
        return hash((self.m, self.grid.shape, self.grid.tobytes()))

    def __repr__(self) -> str:
        return f"FrequencySquare(n={self.n}, m={self.m})"

    def __str__(self) -> str:
        return format_square(self).rstrip("\n")


def pair_counts(F: FrequencySquare, G: FrequencySquare) -> np.ndarray:
    """The m x m matrix whose (i, j) entry counts cells with F = i and G = j."""
    if F.n != G.n or F.m != G.m:
        raise TypeMismatch(f"types differ: (n={F.n}, m={F.m}) vs (n={G.n}, m={G.m})")
    m = F.m
    flat = (F.grid * m + G.grid).ravel()
    return np.bincount(flat, minlength=m * m).reshape(m, m)


def are_orthogonal(F: FrequencySquare, G: FrequencySquare) -> bool:
    """True iff every ordered symbol pair occurs lambda^2 times when F and G are superimposed."""
    counts = pair_counts(F, G)
    return bool((counts == F.lam ** 2).all())


@dataclass(frozen=True, eq=False)
class MofsSet:
    """An ordered collection of frequency squares sharing one type.

    Membership does not require orthogonality; :meth:`pair_status` reports it.
    """

    squares: tuple[FrequencySquare, ...]
    n: int
    m: int

    def __init__(self, squares: Iterable[FrequencySquare], n: int | None = None,
                 m: int | None = None):
        sq = tuple(squares)
        if sq:
            n0, m0 = sq[0].n, sq[0].m
            for i, s in enumerate(sq):
                if (s.n, s.m) != (n0, m0):
                    raise TypeMismatch(f"square {i} has type (n={s.n}, m={s.m}), "
                                       f"expected (n={n0}, m={m0})")
            if n is not None and n != n0 or m is not None and m != m0:
                raise TypeMismatch("declared type disagrees with the squares")
            n, m = n0, m0
        elif n is None or m is None:
            raise ValueError("an empty set needs explicit n and m")
        if n % m:
            raise SquareError(f"symbol count {m} does not divide order {n}")
        object.__setattr__(self, "squares", sq)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "m", int(m))

    @property
    def k(self) -> int:
        return len(self.squares)

    @property
    def lam(self) -> int:
        return self.n // self.m

    def __len__(self) -> int:
        return len(self.squares)

    def __iter__(self):
        return iter(self.squares)

    def __getitem__(self, i):
        return self.squares[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MofsSet):
            return NotImplemented
        return (self.n, self.m) == (other.n, other.m) and self.squares == other.squares

    def __hash__(self) -> int:
        return hash((self.n, self.m, self.squares))

    def __repr__(self) -> str:
        return f"MofsSet(k={self.k}, n={self.n}, m={self.m})"

    def pair_status(self) -> dict[tuple[int, int], bool]:
        return {(i, j): are_orthogonal(self.squares[i], self.squares[j])
                for i, j in itertools.combinations(range(self.k), 2)}

    def is_mofs(self) -> bool:
        return all(self.pair_status().values())

    def with_square(self, F: FrequencySquare) -> "MofsSet":
        return MofsSet(self.squares + (F,), self.n, self.m)


@dataclass
class PairFailure:
    i: int
    j: int
    symbols: tuple[int, int]
    count: int
    expected: int


@dataclass
class MofsReport:
    square_errors: dict[int, str] = field(default_factory=dict)
    pair_failures: list[PairFailure] = field(default_factory=list)
    pairs_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.square_errors and not self.pair_failures

    def failing_pairs(self) -> set[tuple[int, int]]:
        return {(f.i, f.j) for f in self.pair_failures}

    def lines(self) -> list[str]:
        out = [f"square {i}: {msg}" for i, msg in sorted(self.square_errors.items())]
        for f in self.pair_failures:
            out.append(f"pair ({f.i},{f.j}): symbols {f.symbols} occur {f.count} times, "
                       f"expected {f.expected}")
        return out


def validate_mofs(squares: MofsSet | Sequence, m: int | None = None) -> MofsReport:
    """Check every square's frequencies and every pair's orthogonality.

    Accepts a :class:`MofsSet` or a sequence of squares / raw grids, so that
    invalid grids are reported instead of raising.
    """
    report = MofsReport()
    if isinstance(squares, MofsSet):
        m = squares.m
    valid: dict[int, FrequencySquare] = {}
    for idx, s in enumerate(squares):
        grid = s.grid if isinstance(s, FrequencySquare) else s
        sm = s.m if isinstance(s, FrequencySquare) else m
        try:
            check_grid(grid, sm)
            valid[idx] = s if isinstance(s, FrequencySquare) else FrequencySquare(grid, sm)
        except SquareError as exc:
            report.square_errors[idx] = str(exc)
    for i, j in itertools.combinations(sorted(valid), 2):
        F, G = valid[i], valid[j]
        report.pairs_checked += 1
        try:
            counts = pair_counts(F, G)
        except TypeMismatch as exc:
            report.square_errors.setdefault(j, str(exc))
            continue
        expected = F.lam ** 2
        for a, b in zip(*np.nonzero(counts != expected)):
            report.pair_failures.append(PairFailure(i, j, (int(a), int(b)),
                                                    int(counts[a, b]), expected))
    return report


class Join:
    """Cellwise tupling of same-shape arrays (squares or rectangles).

    ``arrays[t][r, c]`` is the t-th coordinate of cell (r, c).
    """

    def __init__(self, *arrays):
        if len(arrays) == 1 and isinstance(arrays[0], (MofsSet, list, tuple)):
            arrays = tuple(arrays[0])
        mats = [_frozen(a.grid if isinstance(a, FrequencySquare) else a) for a in arrays]
        if not mats:
            raise ValueError("a join needs at least one array")
        shape = mats[0].shape
        if any(a.shape != shape for a in mats):
            raise TypeMismatch("joined arrays must share one shape")
        self.arrays = tuple(mats)
        self.shape = shape

    @property
    def k(self) -> int:
        return len(self.arrays)

    @property
    def n_rows(self) -> int:
        return self.shape[0]

    @property
    def n_cols(self) -> int:
        return self.shape[1]

    def cell(self, r: int, c: int) -> tuple[int, ...]:
        return tuple(int(a[r, c]) for a in self.arrays)

    def rows(self, *rows: int) -> "Join":
        """The join restricted to the given rows, in the given order."""
        idx = list(rows)
        return Join(*(a[idx] for a in self.arrays))

    def stacked(self) -> np.ndarray:
        """Array of shape (rows, cols, k)."""
        return np.stack(self.arrays, axis=-1)


def _check_row(join: Join, r: int) -> None:
    if not 0 <= r < join.n_rows:
        raise IndexError(f"row {r} out of range 0..{join.n_rows - 1}")


def psi(join: Join, r: int) -> int:
    """Number of (0,0) cells in row ``r`` of a join of two binary arrays."""
    if join.k != 2:
        raise ValueError("psi needs a join of exactly two arrays")
    _check_row(join, r)
    a, b = join.arrays
    return int(((a[r] == 0) & (b[r] == 0)).sum())


def eta(F: FrequencySquare | np.ndarray, r1: int, r2: int) -> int:
    """Number of columns with symbol 0 in both rows ``r1`` and ``r2``."""
    grid = F.grid if isinstance(F, FrequencySquare) else np.asarray(F)
    if isinstance(F, FrequencySquare) and F.m != 2:
        raise ValueError("eta is defined for binary squares")
    for r in (r1, r2):
        if not 0 <= r < grid.shape[0]:
            raise IndexError(f"row {r} out of range")
    if r1 == r2:
        raise ValueError("eta needs two distinct rows")
    return int(((grid[r1] == 0) & (grid[r2] == 0)).sum())


ISOMORPHISM_OPS = ("rows", "columns", "transpose", "symbols", "squares")


def _check_perm(perm, size: int) -> list[int]:
    p = [int(x) for x in perm]
    if sorted(p) != list(range(size)):
        raise ValueError(f"not a permutation of 0..{size - 1}: {perm}")
    return p


def apply_isomorphism(mofs: MofsSet, op: str, perm: Sequence[int] | None = None,
                      square: int | None = None) -> MofsSet:
    """Apply one isomorphism operation to every square (or to ``square``).

    ``rows`` / ``columns``: new row i is old row ``perm[i]``.
    ``symbols``: symbol s in square ``square`` becomes ``perm[s]``.
    ``squares``: new square i is old square ``perm[i]``.
    """
    n, m = mofs.n, mofs.m
    if op == "transpose":
        return MofsSet((s.transpose() for s in mofs), n, m)
    if perm is None:
        raise ValueError(f"operation {op!r} needs a permutation")
    if op == "rows":
        p = _check_perm(perm, n)
        return MofsSet((FrequencySquare(s.grid[p], m, validate=False) for s in mofs), n, m)
    if op == "columns":
        p = _check_perm(perm, n)
        return MofsSet((FrequencySquare(s.grid[:, p], m, validate=False) for s in mofs), n, m)
    if op == "symbols":
        p = np.array(_check_perm(perm, m))
        if square is None or not 0 <= square < mofs.k:
            raise ValueError("symbol permutation needs a valid square index")
        out = list(mofs.squares)
        out[square] = FrequencySquare(p[out[square].grid], m, validate=False)
        return MofsSet(out, n, m)
    if op == "squares":
        p = _check_perm(perm, mofs.k)
        return MofsSet((mofs.squares[i] for i in p), n, m)
    raise ValueError(f"unknown isomorphism operation {op!r}; expected one of {ISOMORPHISM_OPS}")


# --- serialization -------------------------------------------------------

def parse_square(text: str) -> FrequencySquare:
    """Parse the plain-text square format: header ``n m`` then n grid lines."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise SquareError("empty input")
    header = lines[0].split()
    if len(header) != 2 or not all(h.isdigit() for h in header):
        raise SquareError("first line must be 'n m'", row=None)
    n, m = int(header[0]), int(header[1])
    body = lines[1:]
    if len(body) != n:
        raise SquareError(f"expected {n} grid lines, found {len(body)}")
    grid = []
    for r, line in enumerate(body):
        if m <= 10:
            if len(line) != n or not line.isdigit():
                raise SquareError(f"row {r}: expected {n} digits, got {line!r}", row=r)
            grid.append([int(ch) for ch in line])
        else:
            toks = line.split()
            if len(toks) != n or not all(t.isdigit() for t in toks):
                raise SquareError(f"row {r}: expected {n} integers, got {line!r}", row=r)
            grid.append([int(t) for t in toks])
    return FrequencySquare(grid, m)


def format_square(F: FrequencySquare) -> str:
    lines = [f"{F.n} {F.m}"]
    for row in F.grid:
        if F.m <= 10:
            lines.append("".join(str(int(x)) for x in row))
        else:
            lines.append(" ".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


def set_to_json(mofs: MofsSet) -> str:
    obj = {"n": mofs.n, "m": mofs.m,
           "squares": [s.grid.tolist() for s in mofs.squares]}
    return json.dumps(obj, separators=(",", ":")) + "\n"


def set_from_json(text: str) -> MofsSet:
    obj = json.loads(text)
    try:
        n, m, squares = int(obj["n"]), int(obj["m"]), obj["squares"]
    except (KeyError, TypeError) as exc:
        raise SquareError(f"set file needs keys n, m, squares: {exc}") from None
    out = []
    for idx, grid in enumerate(squares):
        try:
            out.append(FrequencySquare(grid, m))
        except SquareError as exc:
            raise SquareError(f"square {idx}: {exc}", exc.row, exc.column) from None
    return MofsSet(out, n, m)


def parse_join_text(text: str) -> MofsSet:
    """Parse superimposed squares written as rows of k-digit cell tokens, e.g. ``101 000 ...``."""
    rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not rows:
        raise SquareError("empty input")
    n = len(rows)
    k = len(rows[0][0])
    cells = []
    for r, toks in enumerate(rows):
        if len(toks) != n or any(len(t) != k or not t.isdigit() for t in toks):
            raise SquareError(f"row {r}: expected {n} tokens of {k} digits", row=r)
        cells.append([[int(ch) for ch in t] for t in toks])
    arr = np.array(cells)
    m = int(arr.max()) + 1
    while n % m:
        m += 1
    return MofsSet((FrequencySquare(arr[:, :, t], m) for t in range(k)), n, m)


def format_join_text(mofs: MofsSet) -> str:
    if mofs.m > 10:
        raise ValueError("join text needs single-digit symbols")
    lines = []
    for r in range(mofs.n):
        lines.append(" ".join("".join(str(int(s.grid[r, c])) for s in mofs)
                              for c in range(mofs.n)))
    return "\n".join(lines) + "\n"


def load_any(text: str) -> MofsSet:
    """Read a set file, a square file, or join text, returning a set."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return set_from_json(text)
    first = stripped.splitlines()[0].split() if stripped else []
    if len(first) == 2 and all(t.isdigit() for t in first) and len(stripped.splitlines()) > 1:
        second = stripped.splitlines()[1].split()
        if len(second) == 1 or int(first[1]) > 10:
            F = parse_square(text)
            return MofsSet([F])
    return parse_join_text(text)
