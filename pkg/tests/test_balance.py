import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mofs.balance import (InadmissibleMatrix, NotGuaranteed, all_exception_templates,
                          achievable_shifts, assemble_mate, build_rectangle, canonicalize,
                          classify_exception, classify_row_types, condense, exception_templates,
                          find_balancer, find_binary_mate, is_admissible, legitimate_swap,
                          orbit3, orbit4, pair_profile, partition_rows, swap_columns, t_label,
                          t_star_members, t_templates, witness_violations)
from mofs.constructions import complete_mofs_prime_power, dilate
from mofs.core import FrequencySquare, Join, MofsSet, are_orthogonal
from mofs.sampling import (admissible_matrices, random_admissible, random_binary_square,
                           random_orthogonal_binary_pair)

from test_acceptance import EG_F, eg_arrays, rectangle_orthogonal


def brute_balancer(A, m, p, q):
    """Every B with 0 <= B <= A meeting the four conditions, by full enumeration."""
    ranges = [range(min(int(a), m) + 1) for a in np.asarray(A).ravel()]
    out = []
    for vals in itertools.product(*ranges):
        B = np.array(vals).reshape(3, 3)
        if B.sum() == m and B[0].sum() - B[1].sum() == p and B[:, 0].sum() - B[:, 1].sum() == q:
            out.append(vals)
    return out


# --- profiles --------------------------------------------------------------

def test_worked_example_profiles():
    X, Y = eg_arrays()
    p = pair_profile(Join(X, Y), 0, 1)
    assert (p.psi1, p.psi2) == (3, 2)
    assert condense(p.Aprime).tolist() == p.A.tolist()
    assert pair_profile((X, Y), 2, 3).A.tolist() == [[1, 1, 1], [1, 1, 1], [1, 1, 0]]


def test_complementary_rows_profile():
    rng = np.random.default_rng(0)
    F1, F2 = random_binary_square(8, rng, 3), random_binary_square(8, rng, 3)
    X = np.vstack([F1.grid[0], 1 - F1.grid[0]])
    Y = np.vstack([F2.grid[0], 1 - F2.grid[0]])
    p = pair_profile((X, Y), 0, 1)
    Ap = p.Aprime
    assert Ap.sum() == 8
    assert Ap[2:].sum() == 0 and Ap[:, 2:].sum() == 0
    assert Ap[0, 1] == Ap[1, 0] or Ap[0, 0] + Ap[1, 1] + Ap[0, 1] + Ap[1, 0] == 8


def test_profile_index_errors():
    X, Y = eg_arrays()
    with pytest.raises(IndexError):
        pair_profile((X, Y), 0, 9)
    with pytest.raises(ValueError):
        pair_profile((X, Y), 1, 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([8, 12]))
def test_profile_invariants_on_random_rows(seed, n):
    rng = np.random.default_rng(seed)
    F1, F2 = random_binary_square(n, rng, 2), random_binary_square(n, rng, 2)
    r1, r2 = rng.choice(n, 2, replace=False)
    p = pair_profile((F1, F2), int(r1), int(r2))
    assert p.Aprime.sum() == n and is_admissible(p.A, n // 2)


# --- equivalence and exceptions -------------------------------------------

def test_orbits():
    sym = np.array([[1, 1, 1], [1, 1, 1], [1, 1, 0]])
    rep, orb = canonicalize(sym)
    assert len({tuple(B.ravel()) for B in orb}) == 1
    e1 = exception_templates(8)["E1"]
    assert [2, 0, 1, 0, 0, 3, 0, 2, 0] in [B.ravel().tolist() for B in orbit3(e1)]
    for A in itertools.islice(admissible_matrices(4), 60):
        distinct = {tuple(B.ravel()) for B in orbit3(A)}
        assert 8 % len(distinct) == 0
    X, Y = eg_arrays()
    Ap = pair_profile((X, Y), 0, 1).Aprime
    assert 16 % len({tuple(B.ravel()) for B in orbit4(Ap)}) == 0


def test_canonicalize_rejects_inadmissible():
    with pytest.raises(InadmissibleMatrix):
        canonicalize(np.array([[1, 0, 0], [0, 0, 0], [0, 0, 0]]), 4)


def test_classify_examples():
    X, Y = eg_arrays()
    assert classify_exception(pair_profile((X, Y), 0, 1).A, 8) == "E1"
    assert classify_exception(pair_profile((X, Y), 2, 3).A, 8) is None
    assert classify_exception(np.array([[3, 0, 0], [3, 0, 0], [0, 6, 0]]), 12) == "E5"


def test_template_residues():
    assert set(exception_templates(8)) == {"E1", "E2"}
    assert set(exception_templates(12)) == {"E5", "E6"}
    assert set(exception_templates(16)) == {"E3", "E4"}
    assert set(exception_templates(20)) == {"E1", "E2", "E5", "E6"}
    assert exception_templates(24) == {}


# --- balancing -------------------------------------------------------------

def test_balancer_examples():
    X, Y = eg_arrays()
    A12 = pair_profile((X, Y), 0, 1).A
    w = find_balancer(A12, 4, 1, 0)
    assert w.B.tolist() == [[1, 0, 1], [0, 0, 1], [0, 1, 0]]
    assert find_balancer(A12, 4, 0, 0) is None
    for m in (2, 4, 6):
        A = np.array([[m, 0, 0], [0, m, 0], [0, 0, 0]])
        assert find_balancer(A, m, 0, 0).B.tolist() == [[m // 2, 0, 0], [0, m // 2, 0], [0, 0, 0]]


@pytest.mark.parametrize("m", [2, 3, 4])
def test_balancer_matches_brute_force(m):
    for A in admissible_matrices(m):
        for p, q in ((0, 0), (1, 0), (0, 1), (1, -1)):
            sols = brute_balancer(A, m, p, q)
            w = find_balancer(A, m, p, q)
            if sols:
                assert w is not None and tuple(w.B.ravel()) == min(sols)
            else:
                assert w is None


def test_exception_equivalence_on_sampled_rows():
    rng = np.random.default_rng(9)
    for n in (8, 12, 16, 20):
        for _ in range(4):
            pair = random_orthogonal_binary_pair(n, rng)
            for r1, r2 in itertools.combinations(range(n), 2):
                A = pair_profile((pair[0], pair[1]), r1, r2).A
                assert (find_balancer(A, n // 2) is None) == (classify_exception(A, n) is not None)


def test_large_corner_implies_balanceable():
    for m in (4, 6):
        for A in admissible_matrices(m):
            if A[2, 2] >= 2:
                assert find_balancer(A, m) is not None


def test_alpha_gamma_quadruples_balance():
    # n = 20 admits both alpha (E1/E2) and gamma (E5/E6) pairs
    n, m = 20, 10
    T = exception_templates(n)
    alpha = [B for k in ("E1", "E2") for B in orbit3(T[k])]
    gamma = [B for k in ("E5", "E6") for B in orbit3(T[k])]
    neg = lambda s: {(-p, -q) for p, q in s}
    for A in alpha:
        sa = achievable_shifts(A, m, 1)
        for C in alpha + gamma:
            assert sa & neg(achievable_shifts(C, m, 1))


def test_witness_violations_flags():
    A = np.array([[2, 0, 1], [0, 0, 3], [0, 2, 0]])
    assert witness_violations(A, np.array([[2, 0, 2], [0, 0, 0], [0, 0, 0]]), 4, 1, 0)


# --- rectangles ------------------------------------------------------------

def test_worked_example_rectangle():
    X, Y = eg_arrays()
    w12 = find_balancer(pair_profile((X, Y), 0, 1).A, 4, 1, 0)
    w34 = find_balancer(pair_profile((X, Y), 2, 3).A, 4, 1, 0)
    R12 = build_rectangle(X, Y, 0, 1, w12)
    R34 = 1 - build_rectangle(X, Y, 2, 3, w34)  # flipped: a (-1, 0) shift
    R = np.vstack([R12, R34])
    assert rectangle_orthogonal(R, X) and rectangle_orthogonal(R, Y)
    assert rectangle_orthogonal(EG_F, X)


def test_rectangle_flip_negates_shift():
    X, Y = eg_arrays()
    w = find_balancer(pair_profile((X, Y), 2, 3).A, 4, 1, 0)
    R = build_rectangle(X, Y, 2, 3, w)
    flipped = 1 - R
    zeros = lambda G, Q: int(((G[[2, 3]] == 0) & (Q == 0)).sum())
    assert zeros(X, R) == 5 and zeros(X, flipped) == 3
    assert zeros(Y, R) == zeros(Y, flipped) == 4


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([8, 12, 16]))
def test_rectangle_properties(seed, n):
    rng = np.random.default_rng(seed)
    pair = random_orthogonal_binary_pair(n, rng)
    r1, r2 = (int(v) for v in rng.choice(n, 2, replace=False))
    A = pair_profile((pair[0], pair[1]), r1, r2).A
    for p, q in ((0, 0), (1, 0), (0, -1)):
        w = find_balancer(A, n // 2, p, q)
        if w is None:
            continue
        R = build_rectangle(pair[0], pair[1], r1, r2, w)
        assert (R.sum(axis=1) == n // 2).all() and (R.sum(axis=0) == 1).all()
        if (p, q) == (0, 0):
            for G in (pair[0].grid, pair[1].grid):
                assert rectangle_orthogonal(R, G[[r1, r2]])


def test_rectangle_rejects_foreign_witness():
    X, Y = eg_arrays()
    w = find_balancer(pair_profile((X, Y), 2, 3).A, 4, 1, 0)
    with pytest.raises(ValueError):
        build_rectangle(X, Y, 0, 1, w)


# --- T types and row tags --------------------------------------------------

def t1_rows():
    """Two rows of order 12 whose profile is the T1 template."""
    f1 = [(0, 1)] * 3 + [(1, 0)] * 3 + [(1, 1)] * 3 + [(0, 0)] * 3
    f2 = [(0, 1)] * 6 + [(1, 0)] * 6
    X = np.array(f1).T
    Y = np.array(f2).T
    return X, Y


def test_t_label_and_legitimate_swap():
    X, Y = t1_rows()
    A = pair_profile((X, Y), 0, 1).A
    assert A.tolist() == t_templates(1)["T1"].tolist()
    assert t_label(A, 1) == "T1"
    # move one F2 zero from a (0,1)/(0,1) column to a class-2/(1,0) column
    X2, Y2 = legitimate_swap((X, Y), 0, 0, 6, on="F2")
    A2 = pair_profile((X2, Y2), 0, 1).A
    assert t_label(A2, 1) == "T1*"
    assert swap_columns((X2, Y2), 0, 1, "T1*") == (0, 6)
    with pytest.raises(ValueError):
        legitimate_swap((X, Y), 0, 0, 1, on="F2")


def test_t_star_groups():
    members = t_star_members(1)
    assert [M.tolist() for M in members["T1*"]] == [[[2, 0, 1], [3, 0, 0], [0, 5, 1]],
                                                   [[3, 0, 0], [2, 0, 1], [0, 5, 1]]]
    assert sum(len(v) for v in members.values()) == 8


def test_alpha1_tag_on_worked_rows():
    # the worked rows plus their complements form a pair of (8;4) squares
    X, Y = eg_arrays()
    X, Y = np.vstack([X, 1 - X]), np.vstack([Y, 1 - Y])
    tab = classify_row_types((X, Y))
    assert tab.pair_labels[(0, 1)] == "E1"
    assert (tab.psi[0], tab.psi[1]) == (3, 2)
    assert "alpha1" in tab.row_tags[0] and "alpha1" in tab.row_tags[1]
    assert not tab.anomalies


@pytest.mark.parametrize("n", [8, 12, 16, 20])
def test_row_count_bounds(n):
    rng = np.random.default_rng(n + 100)
    y = n // 8
    for _ in range(6):
        pair = random_orthogonal_binary_pair(n, rng)
        tab = classify_row_types(Join(pair[0], pair[1]))
        assert not tab.anomalies
        for tag in ("alpha1", "alpha2", "beta1", "beta2"):
            count = sum(tag in tags for tags in tab.row_tags.values())
            assert count <= 3 * n * n / (4 * (n - 2))
        for r in range(n):
            if tab.psi[r] == 2 * y + 1 and "gamma1" in tab.row_tags[r]:
                similar = sum(1 for (a, b), t in tab.t_labels.items()
                              if a == r and t in ("T1", "T1*", "T2", "T2*"))
                assert similar <= n // 2 + 1
        for label in tab.pair_labels.values():
            if label in ("E1", "E2"):
                assert n % 6 == 2
            elif label in ("E3", "E4"):
                assert n % 6 == 4
            else:
                assert n % 8 == 4


def test_row_types_precondition():
    rng = np.random.default_rng(1)
    with pytest.raises(ValueError):
        classify_row_types(Join(random_binary_square(6, rng, 2), random_binary_square(6, rng, 2)))


# --- partition and mate ----------------------------------------------------

def test_partition_witnesses_sum_to_zero():
    rng = np.random.default_rng(13)
    for n in (8, 12):
        pair = random_orthogonal_binary_pair(n, rng)
        groups = partition_rows(pair[0], pair[1])
        rows = sorted(r for g in groups for r in g.rows)
        assert rows == list(range(n))
        for g in groups:
            assert sum(pa.witness.p for pa in g.pairs) == 0
            assert sum(pa.witness.q for pa in g.pairs) == 0
        F = assemble_mate(pair[0], pair[1], groups)
        assert are_orthogonal(F, pair[0]) and are_orthogonal(F, pair[1])


def test_mate_examples():
    rng = np.random.default_rng(14)
    F = random_binary_square(8, rng, 3)
    M = find_binary_mate(F, F)
    assert are_orthogonal(M, F)
    base = MofsSet(list(complete_mofs_prime_power(2, 2))[:2])
    d = dilate(base, 2)
    M = find_binary_mate(d[0], d[1])
    assert are_orthogonal(M, d[0]) and are_orthogonal(M, d[1])


def test_mate_order_two_mod_four():
    rng = np.random.default_rng(15)
    for _ in range(3):
        pair = random_orthogonal_binary_pair(4, rng)
        six = [random_binary_square(6, rng, 3) for _ in range(2)]
        try:
            M = find_binary_mate(*six)
        except NotGuaranteed:
            continue
        assert all(are_orthogonal(M, G) for G in six)
        assert pair.k == 2


def test_mate_on_non_orthogonal_multiple_of_24():
    rng = np.random.default_rng(16)
    F1, F2 = random_binary_square(24, rng, 4), random_binary_square(24, rng, 4)
    M = find_binary_mate(F1, F2)
    assert are_orthogonal(M, F1) and are_orthogonal(M, F2)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([8, 12, 16]))
def test_random_admissible_is_admissible(seed, n):
    A = random_admissible(n // 2, np.random.default_rng(seed))
    assert is_admissible(A, n // 2)
