import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tiltbench import linalg as la

FIELDS = [(2, 1, None), (3, 1, None), (2, 2, (1, 1, 1)), (3, 2, None)]


def _F(p, e, mod):
    return la.field(p, e, mod)


# --- scalar oracle: polynomial arithmetic, no log tables ----------------------


def _poly_mul_oracle(F, a, b):
    if F.e == 1:
        return (a * b) % F.p
    return F._mul_slow(a, b)


def _add_oracle(F, a, b):
    da, db = F.to_poly(a), F.to_poly(b)
    return F.from_poly([(x + y) % F.p for x, y in zip(da, db)])


def _inv_oracle(F, a):
    return next(x for x in range(1, F.q) if _poly_mul_oracle(F, a, x) == 1)


def _rank_oracle(F, M):
    """Scalar Gaussian elimination with Python ints."""
    A = [list(map(int, r)) for r in M]
    rows, cols = len(A), len(A[0]) if A else 0
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        iv = _inv_oracle(F, A[r][c])
        A[r] = [_poly_mul_oracle(F, iv, x) for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c]:
                f = A[i][c]
                neg = [int(F.neg(_poly_mul_oracle(F, f, x))) for x in A[r]]
                A[i] = [_add_oracle(F, x, y) for x, y in zip(A[i], neg)]
        r += 1
    return r


# --- field axioms, exhaustive --------------------------------------------------


@pytest.mark.parametrize("p,e,mod", FIELDS, ids=["GF2", "GF3", "GF4", "GF9"])
def test_field_axioms_exhaustive(p, e, mod):
    F = _F(p, e, mod)
    q = F.q
    x = np.arange(q)
    a, b = np.meshgrid(x, x, indexing="ij")
    A, B, C = np.meshgrid(x, x, x, indexing="ij")
    add, mul = F.add, F.mul
    # tables agree with the polynomial oracle
    assert all(int(mul(i, j)) == _poly_mul_oracle(F, i, j) for i in range(q) for j in range(q))
    assert all(int(add(i, j)) == _add_oracle(F, i, j) for i in range(q) for j in range(q))
    assert np.array_equal(add(a, b), add(b, a))
    assert np.array_equal(mul(a, b), mul(b, a))
    assert np.array_equal(add(add(A, B), C), add(A, add(B, C)))
    assert np.array_equal(mul(mul(A, B), C), mul(A, mul(B, C)))
    assert np.array_equal(mul(A, add(B, C)), add(mul(A, B), mul(A, C)))
    assert np.array_equal(add(x, 0), x)
    assert np.array_equal(mul(x, 1), x)
    assert not add(x, F.neg(x)).any()
    nz = x[1:]
    assert np.all(mul(nz, F.inv(nz)) == 1)
    assert np.array_equal(F.sub(a, b), add(a, F.neg(b)))
    with pytest.raises(ZeroDivisionError):
        F.inv(0)
    # the multiplicative group is cyclic of order q - 1
    def order(g):
        k, y = 1, g
        while y != 1:
            y, k = int(mul(y, g)), k + 1
        return k

    assert max(order(g) for g in range(1, q)) == q - 1


def test_field_rejects_bad_parameters():
    with pytest.raises(la.FieldError):
        la.Field(4)
    with pytest.raises(la.FieldError):
        la.Field(2, 2, [1, 0, 1])  # x^2 + 1 = (x + 1)^2 over GF(2)


def test_first_irreducible_is_irreducible():
    for p, e in [(2, 2), (2, 3), (3, 2), (5, 2)]:
        assert la.is_irreducible(la.first_irreducible(p, e), p)


# --- matmul ------------------------------------------------------------------


@pytest.mark.parametrize("p,e,mod", FIELDS, ids=["GF2", "GF3", "GF4", "GF9"])
def test_matmul_matches_scalar_oracle(p, e, mod):
    F = _F(p, e, mod)
    rng = np.random.default_rng(1)
    A, B = F.random(rng, (5, 7)), F.random(rng, (7, 4))
    C = F.matmul(A, B)
    for i in range(5):
        for j in range(4):
            acc = 0
            for k in range(7):
                acc = _add_oracle(F, acc, _poly_mul_oracle(F, int(A[i, k]), int(B[k, j])))
            assert C[i, j] == acc


def test_matmul_chunks_large_inner_dimension():
    # inner dimension beyond the float64-exact chunk for p = 65521
    F = la.Field(65521)
    rng = np.random.default_rng(0)
    A, B = F.random(rng, (2, 3000)), F.random(rng, (3000, 2))
    expect = (A.astype(object) @ B.astype(object)) % 65521
    assert np.array_equal(F.matmul(A, B), expect.astype(np.int64))


# --- rref / rank / kernels / solve: randomised round trips ---------------------


def _random_low_rank(F, rng, m, n):
    r = int(rng.integers(0, min(m, n) + 1))
    return F.matmul(F.random(rng, (m, r)), F.random(rng, (r, n))) if r else np.zeros((m, n), np.int64)


def test_rref_solve_kernel_round_trips_1000_cases():
    rng = np.random.default_rng(20240601)
    F = la.field(3)
    for case in range(1000):
        m, n = (int(v) for v in rng.integers(1, 9, size=2))
        M = _random_low_rank(F, rng, m, n) if case % 2 else F.random(rng, (m, n))
        R, piv, rk = la.rref(F, M)
        # echelon shape: pivots increasing, pivot columns are unit vectors
        assert piv == sorted(piv) and len(piv) == rk
        assert np.array_equal(R[:rk][:, piv], np.eye(rk, dtype=np.int64))
        assert not R[rk:].any()
        # same row space: every row of M lies in span(R), and rank matches
        assert la.rank(F, np.concatenate([R[:rk], M])) == rk
        assert rk == _rank_oracle(F, M)
        # nullspace
        K, free = la.nullspace(F, M)
        assert K.shape[0] == n - rk
        assert not F.matmul(M, K.T).any()
        assert np.array_equal(K[:, free], np.eye(len(free), dtype=np.int64))
        # left kernel
        L = la.kernel_basis(F, M, side="left")
        assert L.shape[0] == m - rk and not F.matmul(L, M).any()
        # solve a consistent system and detect an inconsistent one
        X0 = F.random(rng, (2, m))
        T = F.matmul(X0, M)
        X = la.solve(F, M, T)
        assert X is not None and np.array_equal(F.matmul(X, M), T)
        if rk < n:
            e = np.zeros(n, dtype=np.int64)
            e[[c for c in range(n) if c not in piv][0]] = 1
            # a unit vector at a free column is never in the row space
            assert la.solve(F, M, e) is None


@pytest.mark.parametrize("p,e,mod", FIELDS, ids=["GF2", "GF3", "GF4", "GF9"])
def test_rank_matches_oracle_over_each_field(p, e, mod):
    F = _F(p, e, mod)
    rng = np.random.default_rng(p * 10 + e)
    for _ in range(60):
        m, n = (int(v) for v in rng.integers(1, 7, size=2))
        M = _random_low_rank(F, rng, m, n)
        assert la.rank(F, M) == _rank_oracle(F, M)
        K, _ = la.nullspace(F, M)
        assert not F.matmul(M, K.T).any()


def test_blocked_rref_wide_panel_boundary():
    # more than one 64-column panel
    F = la.field(3)
    rng = np.random.default_rng(7)
    M = _random_low_rank(F, rng, 90, 150)
    assert la.rank(F, M) == _rank_oracle(F, M)


def test_span_and_independent_rows():
    F = la.field(2)
    M = np.array([[1, 0, 1], [0, 1, 1], [1, 1, 0], [0, 0, 1]])
    assert la.independent_rows(F, M) == [0, 1, 3]
    B, piv = la.span(F, [M[:2], M[2:3], M[3:]], 3)
    assert B.shape[0] == 3 and piv == [0, 1, 2]


def test_batch_rank_matches_rank():
    F = la.field(2, 2, (1, 1, 1))
    rng = np.random.default_rng(3)
    stack = np.stack([_random_low_rank(F, rng, 4, 5) for _ in range(40)])
    assert la.batch_rank(F, stack).tolist() == [la.rank(F, s) for s in stack]


def test_enumerate_coefficients_is_lexicographic():
    rows = la.enumerate_coefficients(3, 2, 0, 9)
    assert [tuple(r) for r in rows] == list(itertools.product(range(3), repeat=2))


@settings(max_examples=60, deadline=None)
@given(
    st.integers(2, 3).flatmap(
        lambda p: st.tuples(
            st.just(p),
            st.lists(st.lists(st.integers(0, p - 1), min_size=4, max_size=4), min_size=1, max_size=6),
        )
    )
)
def test_rank_nullity(data):
    p, rows = data
    F = la.field(p)
    M = np.array(rows, dtype=np.int64)
    rk = la.rank(F, M)
    K, _ = la.nullspace(F, M)
    assert rk + K.shape[0] == M.shape[1]
    assert rk == _rank_oracle(F, M)
    assert la.rank(F, M.T) == rk
