import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ewcalc.linalg import (
    DEFAULT_PRIME,
    Field,
    Matrix,
    cokernel,
    find_invertible_in_span,
    inverse,
    is_invertible,
    kernel_basis,
    kron,
    kron_all,
    kron_swap_perm,
    mm,
    quotient_section,
    rank,
    solve,
)

P = DEFAULT_PRIME


def arr(rows):
    return np.array(rows, dtype=np.int64)


# ---------------------------------------------------------------- field/matrix


def test_field_rejects_composite_and_two():
    with pytest.raises(ValueError):
        Field(91)  # 7 * 13
    with pytest.raises(ValueError):
        Field(2)
    assert Field(109).p == 109


def test_default_prime_has_fourth_and_cube_roots_of_unity():
    # the corpus needs i and a primitive cube root; frozen: 33 and 45 mod 109
    assert (33 * 33) % P == P - 1
    assert pow(45, 3, P) == 1 and 45 != 1


def test_matrix_validates_entry_count():
    with pytest.raises(ValueError):
        Matrix(2, 2, [1, 2, 3], P)
    m = Matrix(2, 2, [1, -1, 110, 4], P)
    assert m.a.tolist() == [[1, 108], [1, 4]]


# ---------------------------------------------------------------- solve


def test_solve_identity_returns_rhs():
    b = arr([3, 5, 7])
    x = solve(np.eye(3, dtype=np.int64), b, P)
    assert x.tolist() == b.tolist()


def test_solve_inconsistent_returns_none():
    assert solve(arr([[0, 0], [0, 0]]), arr([1, 0]), P) is None


def test_solve_frozen_2x2():
    # A = [[1,2],[3,4]], b = [5,6]; hand inverse mod 109 gives x = [105, 59]
    A = arr([[1, 2], [3, 4]])
    x = solve(A, arr([5, 6]), P)
    assert x.tolist() == [105, 59]
    assert (mm(A, x.reshape(-1, 1), p=P).reshape(-1)).tolist() == [5, 6]


def test_solve_shape_mismatch_is_input_error():
    with pytest.raises(ValueError):
        solve(arr([[1, 2]]), arr([1, 2]), P)


def test_solve_matrix_rhs():
    A = arr([[1, 2], [3, 4]])
    X = solve(A, np.eye(2, dtype=np.int64), P)
    assert mm(A, X, p=P).tolist() == np.eye(2, dtype=int).tolist()
    # frozen hand inverse
    assert X.tolist() == [[107, 1], [56, 54]]


# ---------------------------------------------------------------- kernel / cokernel


def test_kernel_of_identity_is_empty():
    K = kernel_basis(np.eye(4, dtype=np.int64), P)
    assert K.shape == (4, 0)


def test_kernel_of_zero_map_is_everything():
    K = kernel_basis(np.zeros((3, 5), dtype=np.int64), P)
    assert K.shape == (5, 5)
    assert rank(K, P) == 5


def test_kernel_frozen_rank_one():
    A = arr([[1, 2, 3], [2, 4, 6]])
    K = kernel_basis(A, P)
    assert K.shape == (3, 2)
    assert np.all(mm(A, K, p=P) == 0)
    assert K.tolist() == [[107, 106], [1, 0], [0, 1]]


def test_cokernel_of_surjective_is_zero():
    q, d = cokernel(np.eye(3, dtype=np.int64), P)
    assert d == 0 and q.shape == (0, 3)


def test_cokernel_of_zero_is_identity_sized():
    q, d = cokernel(np.zeros((3, 2), dtype=np.int64), P)
    assert d == 3
    assert rank(q, P) == 3


def test_cokernel_column_frozen():
    A = arr([[1], [2], [3]])
    q, d = cokernel(A, P)
    assert d == 2
    assert np.all(mm(q, A, p=P) == 0)
    assert rank(q, P) == 2
    s = quotient_section(q, P)
    assert mm(q, s, p=P).tolist() == np.eye(2, dtype=int).tolist()


# ---------------------------------------------------------------- kron


def test_kron_identities():
    assert kron(np.eye(2, dtype=np.int64), np.eye(3, dtype=np.int64), P).tolist() == (
        np.eye(6, dtype=int).tolist()
    )


def test_kron_scalar_factor():
    A = arr([[1, 2], [3, 4]])
    assert kron(A, arr([[5]]), P).tolist() == (5 * A % P).tolist()


def test_kron_entrywise_frozen():
    A = arr([[1, 2], [3, 4]])
    B = arr([[0, 5], [6, 7]])
    expected = [
        [0, 5, 0, 10],
        [6, 7, 12, 14],
        [0, 15, 0, 20],
        [18, 21, 24, 28],
    ]
    assert kron(A, B, P).tolist() == expected


def test_kron_swap_perm_conjugates():
    rng = np.random.default_rng(7)
    A = rng.integers(0, P, size=(2, 2))
    B = rng.integers(0, P, size=(3, 3))
    S = kron_swap_perm(2, 3)
    lhs = mm(S, kron(A, B, P), S.T, p=P)
    assert lhs.tolist() == kron(B, A, P).tolist()


# ---------------------------------------------------------------- invertible in span


def test_span_identity():
    got = find_invertible_in_span([np.eye(2, dtype=np.int64)], P)
    assert got is not None and got.tolist() == np.eye(2, dtype=int).tolist()


def test_span_nilpotent_has_none():
    N = arr([[0, 1], [0, 0]])
    assert find_invertible_in_span([N], P, trials=16, seed=1) is None


def test_span_full_matrix_algebra():
    basis = []
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=np.int64)
            e[i, j] = 1
            basis.append(e)
    got = find_invertible_in_span(basis, P, seed=3)
    assert got is not None and is_invertible(got, P)


def test_span_rejects_ragged():
    with pytest.raises(ValueError):
        find_invertible_in_span([np.eye(2, dtype=np.int64), np.eye(3, dtype=np.int64)], P)


def test_span_empty_is_none():
    assert find_invertible_in_span([], P) is None


# ---------------------------------------------------------------- laws

dims = st.integers(min_value=1, max_value=5)


def matrices(m, n):
    return st.lists(
        st.lists(st.integers(0, P - 1), min_size=n, max_size=n),
        min_size=m,
        max_size=m,
    ).map(arr)


class TestSolveLaws:
    @given(st.data())
    @settings(max_examples=40, deadline=None)
    def test_solution_remultiplies(self, data):
        m, n = data.draw(dims), data.draw(dims)
        A = data.draw(matrices(m, n))
        x0 = data.draw(matrices(n, 1))
        b = mm(A, x0, p=P)
        x = solve(A, b, P)
        assert x is not None  # consistent by construction
        assert mm(A, x, p=P).tolist() == b.tolist()

    @given(st.data())
    @settings(max_examples=40, deadline=None)
    def test_rank_nullity(self, data):
        m, n = data.draw(dims), data.draw(dims)
        A = data.draw(matrices(m, n))
        K = kernel_basis(A, P)
        assert rank(A, P) + K.shape[1] == n
        if K.shape[1]:
            assert np.all(mm(A, K, p=P) == 0)
            assert rank(K, P) == K.shape[1]

    @given(st.data())
    @settings(max_examples=40, deadline=None)
    def test_cokernel_laws(self, data):
        m, n = data.draw(dims), data.draw(dims)
        A = data.draw(matrices(m, n))
        q, d = cokernel(A, P)
        assert d == m - rank(A, P)
        assert q.shape == (d, m)
        if d:
            assert np.all(mm(q, A, p=P) == 0)
            assert rank(q, P) == d


class TestKronLaws:
    @given(st.data())
    @settings(max_examples=25, deadline=None)
    def test_associative_exactly(self, data):
        # with the fixed slow/fast convention the reshuffle is the identity
        A = data.draw(matrices(2, 2))
        B = data.draw(matrices(2, 3))
        C = data.draw(matrices(3, 2))
        assert kron(kron(A, B, P), C, P).tolist() == kron(A, kron(B, C, P), P).tolist()
        assert kron_all([A, B, C], P).tolist() == kron(A, kron(B, C, P), P).tolist()

    @given(st.data())
    @settings(max_examples=25, deadline=None)
    def test_mixed_product(self, data):
        A = data.draw(matrices(2, 2))
        C = data.draw(matrices(2, 2))
        B = data.draw(matrices(3, 3))
        D = data.draw(matrices(3, 3))
        lhs = mm(kron(A, B, P), kron(C, D, P), p=P)
        rhs = kron(mm(A, C, p=P), mm(B, D, p=P), P)
        assert lhs.tolist() == rhs.tolist()


def test_inverse_round_trip():
    A = arr([[1, 2], [3, 4]])
    X = inverse(A, P)
    assert X is not None
    assert mm(X, A, p=P).tolist() == np.eye(2, dtype=int).tolist()
    assert inverse(arr([[1, 2], [2, 4]]), P) is None
