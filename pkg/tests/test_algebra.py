import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ewcalc.algebra import (
    Algebra,
    Bimodule,
    Module,
    ModuleMap,
    conjugate_module,
    coregular_end_maps,
    coregular_module,
    direct_sum,
    hom_dim,
    hom_space,
    is_isomorphic,
    linear_dual_module,
    opposite_algebra,
    regular_bimodule,
    regular_module,
    tensor_algebra,
    tensor_over,
    trivial_module_like,
    validate_algebra,
    validate_module,
)
from ewcalc.hopf import builtin_examples, cyclic_group_algebra, symmetric3_group_algebra
from ewcalc.linalg import DEFAULT_PRIME, inverse, is_invertible, mm

P = DEFAULT_PRIME


@pytest.fixture(scope="module")
def kC2():
    return cyclic_group_algebra(P, 2).algebra


@pytest.fixture(scope="module")
def kS3():
    return symmetric3_group_algebra(P).algebra


def char_mod(A, scalars, name):
    mats = (np.asarray(scalars, dtype=np.int64) % P).reshape(A.n, 1, 1)
    return Module(A, mats, name=name)


def test_group_algebra_validates(kC2):
    assert validate_algebra(kC2) == []


def test_corrupted_constant_names_triple():
    A = cyclic_group_algebra(P, 3).algebra
    c = A.c.copy()
    c[1, 1, 2] = 0
    c[1, 1, 0] = 1  # g*g rerouted to the identity: breaks (g*g)*g^2 = g*(g*g^2)
    msgs = validate_algebra(Algebra(c, A.unit, P, name="bad", check=False))
    assert msgs == [
        "associativity fails at basis triple (1, 1, 2)",
        "associativity fails at basis triple (1, 2, 2)",
        "associativity fails at basis triple (2, 1, 1)",
        "associativity fails at basis triple (2, 2, 1)",
    ]
    with pytest.raises(ValueError):
        Algebra(c, A.unit, P, name="bad")


def test_regular_module_involution(kC2):
    R = regular_module(kC2)
    assert validate_module(R) == []
    g = R.mats[1]
    assert np.array_equal(mm(g, g, p=P), np.eye(2, dtype=np.int64))


def test_coregular_module_validates(kS3):
    Q = coregular_module(kS3)
    assert validate_module(Q) == []


def test_coregular_end_maps_antimultiplicative(kS3):
    # e_{hk} = e_k e_h for the wedge maps on the coregular probe
    e = coregular_end_maps(kS3)
    rng = np.random.default_rng(7)
    for _ in range(5):
        u = rng.integers(0, P, size=6)
        v = rng.integers(0, P, size=6)
        uv = kS3.multiply(u, v)
        e_u = np.einsum("i,iab->ab", u, e) % P
        e_v = np.einsum("i,iab->ab", v, e) % P
        e_uv = np.einsum("i,iab->ab", uv, e) % P
        assert np.array_equal(e_uv, mm(e_v, e_u, p=P))


def test_hom_space_between_distinct_characters_is_zero(kC2):
    triv = char_mod(kC2, [1, 1], "triv")
    sign = char_mod(kC2, [1, P - 1], "sign")
    assert hom_space(triv, sign) == []
    assert hom_dim(triv, triv) == 1


def test_hom_space_regular_to_module_has_module_dimension(kS3):
    # Hom(A, M) = M for the regular module: free of rank one
    R = regular_module(kS3)
    M = direct_sum(char_mod(kS3, [1] * 6, "triv"),
                   char_mod(kS3, [1, 1, 1, P - 1, P - 1, P - 1], "sgn"))
    assert hom_dim(R, M) == M.dim
    for f in hom_space(R, M):
        assert ModuleMap(R, M, f).is_intertwiner()


def test_is_isomorphic_distinguishes_characters(kC2):
    triv = char_mod(kC2, [1, 1], "triv")
    sign = char_mod(kC2, [1, P - 1], "sign")
    res = is_isomorphic(triv, sign)
    assert res.status == "no"
    assert not res


def test_is_isomorphic_finds_certificate_for_permuted_copy(kS3):
    R = regular_module(kS3)
    perm = np.zeros((6, 6), dtype=np.int64)
    order = [3, 0, 5, 1, 4, 2]
    for i, j in enumerate(order):
        perm[j, i] = 1
    R2 = conjugate_module(R, perm)
    assert validate_module(R2) == []
    res = is_isomorphic(R, R2, seed=3)
    assert res.status == "yes"
    assert np.array_equal(mm(res.f_inv, res.f, p=P), np.eye(6, dtype=np.int64))
    for i in range(6):
        assert np.array_equal(mm(res.f, R.mats[i], p=P), mm(R2.mats[i], res.f, p=P))


def test_is_isomorphic_dim_mismatch(kC2):
    triv = char_mod(kC2, [1, 1], "triv")
    assert is_isomorphic(triv, regular_module(kC2)).status == "no"


def test_opposite_of_opposite_is_original(kS3):
    assert np.array_equal(opposite_algebra(opposite_algebra(kS3)).c, kS3.c)
    assert validate_algebra(opposite_algebra(kS3)) == []


def test_tensor_algebra_validates(kC2, kS3):
    T = tensor_algebra(kC2, kS3)
    assert T.n == 12
    assert validate_algebra(T) == []
    assert validate_module(regular_module(T)) == []


def test_linear_dual_swaps_sides(kS3):
    R = regular_module(kS3)
    Rd = linear_dual_module(R)
    assert Rd.algebra.n == 6
    assert validate_module(Rd) == []
    # dual of the regular module is the coregular module of the opposite
    Q = coregular_module(opposite_algebra(kS3))
    assert np.array_equal(Rd.mats, Q.mats)


def test_hom_dim_duality(kS3):
    triv = char_mod(kS3, [1] * 6, "triv")
    R = regular_module(kS3)
    assert hom_dim(R, triv) == hom_dim(linear_dual_module(triv), linear_dual_module(R))


def test_tensor_over_unit_law(kS3):
    # A (x)_A Y = Y, with the residual left action descending to Y's
    A = kS3
    X = Module(opposite_algebra(A), A.basis_right_mults(), name="A", check=False)
    Y = regular_module(A)
    res = tensor_over(A, X, Y, x_extra=tuple(A.basis_left_mults()))
    assert res.dim == Y.dim
    emb = np.kron(A.unit.reshape(-1, 1), np.eye(Y.dim, dtype=np.int64))
    iso = mm(res.projection, emb, p=P)
    assert is_invertible(iso, P)
    iso_inv = inverse(iso, P)
    for i in range(A.n):
        transported = mm(iso_inv, res.x_residual[i], iso, p=P)
        assert np.array_equal(transported, Y.mats[i])


def test_tensor_over_characters(kC2):
    # sign (x)_A sign is one-dimensional
    A = kC2
    sign_right = Module(opposite_algebra(A),
                        (np.array([1, P - 1], dtype=np.int64)).reshape(2, 1, 1),
                        name="sign", check=False)
    sign = char_mod(A, [1, P - 1], "sign")
    res = tensor_over(A, sign_right, sign)
    assert res.dim == 1


def test_bimodule_regular_validates(kS3):
    B = regular_bimodule(kS3)
    assert B.validate() == []
    M = B.as_module()
    assert validate_module(M) == []


def test_bimodule_rejects_noncommuting_actions(kC2, kS3):
    L = regular_module(kC2).mats
    R3 = regular_module(kS3).mats  # wrong shape entirely
    with pytest.raises(ValueError):
        Bimodule(kC2, kS3, L, R3)


def test_trivial_module_like_rejects_noncharacter(kS3):
    with pytest.raises(ValueError):
        trivial_module_like(kS3, [1, 2, 3, 4, 5, 6])


class TestHomLaws:
    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_hom_elements_are_intertwiners(self, seed):
        A = symmetric3_group_algebra(P).algebra
        rng = np.random.default_rng(seed)
        g = rng.integers(0, P, size=(6, 6))
        while not is_invertible(g % P, P):
            g = rng.integers(0, P, size=(6, 6))
        M = conjugate_module(regular_module(A), g % P)
        fs = hom_space(regular_module(A), M, seed=seed % 97)
        assert len(fs) == 6
        for f in fs:
            assert ModuleMap(regular_module(A), M, f).is_intertwiner()

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_conjugate_is_isomorphic(self, seed):
        A = cyclic_group_algebra(P, 3).algebra
        rng = np.random.default_rng(seed)
        g = rng.integers(0, P, size=(3, 3))
        while not is_invertible(g % P, P):
            g = rng.integers(0, P, size=(3, 3))
        M = regular_module(A)
        res = is_isomorphic(M, conjugate_module(M, g % P), seed=seed % 89)
        assert res.status == "yes"
