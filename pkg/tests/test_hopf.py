import numpy as np
import pytest

from ewcalc.algebra import validate_module
from ewcalc.hopf import (
    HopfAlgebra,
    antipode_power,
    builtin_examples,
    char_module,
    diagonal_tensor_module,
    distinguished_data,
    dual_cyclic2_hopf,
    freeness_iso,
    kappa_dual_module,
    left_coev,
    left_ev,
    regular_hopf_module,
    right_coev,
    right_ev,
    sweedler_hopf,
    symmetric3_group_algebra,
    unit_module,
    validate_hopf,
)
from ewcalc.linalg import DEFAULT_PRIME, kron, kron_swap_perm, mm

P = DEFAULT_PRIME


@pytest.fixture(scope="module")
def corpus():
    return builtin_examples(P)


def test_builtins_validate(corpus):
    assert set(corpus) == {"k", "kC2", "kC3", "kS3", "H4", "kC2*"}
    for H in corpus.values():
        assert validate_hopf(H) == []


def test_group_algebra_rejects_dividing_prime():
    with pytest.raises(ValueError, match="divides"):
        symmetric3_group_algebra(3)


def test_sweedler_antipode_powers(corpus):
    H = corpus["H4"]
    S2 = antipode_power(H, 2)
    assert not np.array_equal(S2, np.eye(4, dtype=np.int64))
    # S^2 x = -x, S^2 gx = -gx
    assert S2[:, 2].tolist() == [0, 0, P - 1, 0]
    assert S2[:, 3].tolist() == [0, 0, 0, P - 1]
    assert np.array_equal(antipode_power(H, 4), np.eye(4, dtype=np.int64))
    assert np.array_equal(mm(antipode_power(H, -1), H.S, p=P),
                          np.eye(4, dtype=np.int64))


def test_sweedler_distinguished_data(corpus):
    data = distinguished_data(corpus["H4"])
    lam = data.left_integral
    # Lambda = x + gx up to scalar
    assert lam[0] == 0 and lam[1] == 0 and lam[2] != 0
    assert lam[3] == lam[2]
    assert data.alpha.tolist() == [1, P - 1, 0, 0]
    assert not data.is_trivial()
    assert validate_module(data.D) == []


def test_group_distinguished_data_trivial(corpus):
    for name in ("kC2", "kC3", "kS3", "kC2*"):
        data = distinguished_data(corpus[name])
        assert data.is_trivial(), name
    # for kG the integral is the sum of group elements
    lamC3 = distinguished_data(corpus["kC3"]).left_integral
    assert len(set(lamC3.tolist())) == 1 and lamC3[0] != 0
    # for functions on C2 it is the delta at the identity
    lam_dual = distinguished_data(corpus["kC2*"]).left_integral
    assert lam_dual[1] == 0 and lam_dual[0] != 0


def test_distinguished_data_rejects_non_hopf_input(corpus):
    # the honest failure mode: integral space of wrong dimension
    H = corpus["kC2"]
    bad = HopfAlgebra(H.algebra, H.delta, H.eps, H.S, check=False)
    bad.eps = np.array([1, 1], dtype=np.int64)  # still fine
    squashed = HopfAlgebra(
        H.algebra, H.delta, np.array([0, 0], dtype=np.int64), H.S, check=False
    )
    with pytest.raises(ValueError, match="integral space has dimension"):
        distinguished_data(squashed)


def test_unit_module_strict(corpus):
    H = corpus["H4"]
    M = regular_hopf_module(H)
    assert np.array_equal(diagonal_tensor_module(H, unit_module(H), M).mats, M.mats)
    assert np.array_equal(diagonal_tensor_module(H, M, unit_module(H)).mats, M.mats)


def test_diagonal_tensor_is_module(corpus):
    H = corpus["H4"]
    M = regular_hopf_module(H)
    MM = diagonal_tensor_module(H, M, M)
    assert validate_module(MM) == []
    K = diagonal_tensor_module(H, kappa_dual_module(H, M, 1), M)
    assert validate_module(K) == []


def test_kappa_dual_iterates(corpus):
    for name in ("H4", "kS3"):
        H = corpus[name]
        M = regular_hopf_module(H)
        once = kappa_dual_module(H, M, 1)
        twice = kappa_dual_module(H, once, 1)
        assert np.array_equal(twice.mats, kappa_dual_module(H, M, 2).mats)
        back = kappa_dual_module(H, once, -1)
        assert np.array_equal(back.mats, M.mats)
        assert validate_module(once) == []
        assert validate_module(kappa_dual_module(H, M, -1)) == []


def test_even_duals_are_monoidal(corpus):
    H = corpus["H4"]
    M = regular_hopf_module(H)
    N = char_module(H, [1, P - 1, 0, 0], "k-")
    lhs = kappa_dual_module(H, diagonal_tensor_module(H, M, N), 2)
    rhs = diagonal_tensor_module(H, kappa_dual_module(H, M, 2),
                                 kappa_dual_module(H, N, 2))
    assert np.array_equal(lhs.mats, rhs.mats)


def test_odd_dual_reverses_tensor_by_coordinate_swap(corpus):
    H = corpus["H4"]
    M = regular_hopf_module(H)
    N = diagonal_tensor_module(H, M, M)
    lhs = kappa_dual_module(H, diagonal_tensor_module(H, M, N), 1)
    rhs = diagonal_tensor_module(H, kappa_dual_module(H, N, 1),
                                 kappa_dual_module(H, M, 1))
    S = kron_swap_perm(M.dim, N.dim)
    for i in range(H.n):
        assert np.array_equal(mm(S, lhs.mats[i], S.T, p=P), rhs.mats[i])


class TestDualityData:
    def snake_right(self, H, M):
        d = M.dim
        eye = np.eye(d, dtype=np.int64)
        ev, coev = right_ev(M), right_coev(M)
        first = mm(kron(eye, ev, P), kron(coev, eye, P), p=P)
        assert np.array_equal(first, eye)
        second = mm(kron(ev, eye, P), kron(eye, coev, P), p=P)
        assert np.array_equal(second, eye)

    def snake_left(self, H, M):
        d = M.dim
        eye = np.eye(d, dtype=np.int64)
        ev, coev = left_ev(M), left_coev(M)
        first = mm(kron(ev, eye, P), kron(eye, coev, P), p=P)
        assert np.array_equal(first, eye)
        second = mm(kron(eye, ev, P), kron(coev, eye, P), p=P)
        assert np.array_equal(second, eye)

    def test_snakes(self, corpus):
        for name in ("kC3", "H4"):
            H = corpus[name]
            M = regular_hopf_module(H)
            self.snake_right(H, M)
            self.snake_left(H, M)

    def test_evaluation_maps_are_linear(self, corpus):
        H = corpus["H4"]
        M = regular_hopf_module(H)
        rdual = kappa_dual_module(H, M, 1)
        ldual = kappa_dual_module(H, M, -1)
        ev_dom = diagonal_tensor_module(H, rdual, M)
        for i in range(H.n):
            lhs = mm(right_ev(M), ev_dom.mats[i], p=P)
            assert np.array_equal(lhs, H.eps[i] * right_ev(M) % P)
        coev_cod = diagonal_tensor_module(H, M, rdual)
        for i in range(H.n):
            lhs = mm(coev_cod.mats[i], right_coev(M), p=P)
            assert np.array_equal(lhs, H.eps[i] * right_coev(M) % P)
        lev_dom = diagonal_tensor_module(H, M, ldual)
        for i in range(H.n):
            lhs = mm(left_ev(M), lev_dom.mats[i], p=P)
            assert np.array_equal(lhs, H.eps[i] * left_ev(M) % P)
        lcoev_cod = diagonal_tensor_module(H, ldual, M)
        for i in range(H.n):
            lhs = mm(lcoev_cod.mats[i], left_coev(M), p=P)
            assert np.array_equal(lhs, H.eps[i] * left_coev(M) % P)

    def test_wrong_side_evaluation_fails_for_sweedler(self, corpus):
        # pairing M (x) M^[1] -> 1 (right dual on the wrong side) is not
        # H-linear when S^2 != id; for group algebras this slip is invisible
        H = corpus["H4"]
        M = regular_hopf_module(H)
        rdual = kappa_dual_module(H, M, 1)
        wrong_dom = diagonal_tensor_module(H, M, rdual)
        broken = [
            i for i in range(H.n)
            if not np.array_equal(mm(left_ev(M), wrong_dom.mats[i], p=P),
                                  H.eps[i] * left_ev(M) % P)
        ]
        assert broken, "wrong-side pairing must fail for H4"
        G = corpus["kC2"]
        N = regular_hopf_module(G)
        gdual = kappa_dual_module(G, N, 1)
        gw = diagonal_tensor_module(G, N, gdual)
        assert all(
            np.array_equal(mm(left_ev(N), gw.mats[i], p=P),
                           G.eps[i] * left_ev(N) % P)
            for i in range(G.n)
        )


def test_freeness_iso_trivializes_diagonal(corpus):
    for name in ("kC3", "H4"):
        H = corpus[name]
        P_reg = regular_hopf_module(H)
        PP = diagonal_tensor_module(H, P_reg, P_reg)
        u, ui = freeness_iso(H)
        eye = np.eye(H.n, dtype=np.int64)
        for i in range(H.n):
            lhs = mm(u, PP.mats[i], p=P)
            rhs = mm(kron(P_reg.mats[i], eye, P), u, p=P)
            assert np.array_equal(lhs, rhs)


def test_flipped_antipode_reports_axiom(corpus):
    H = corpus["H4"]
    S_bad = H.S.copy()
    S_bad[:, 2] = (-S_bad[:, 2]) % P  # S(x) = +gx instead of -gx
    bad = HopfAlgebra(H.algebra, H.delta, H.eps, S_bad, check=False)
    msgs = validate_hopf(bad)
    assert "antipode axiom (S*id) fails" in msgs
    assert "antipode axiom (id*S) fails" in msgs
    assert not any("coassociativity" in m for m in msgs)
    with pytest.raises(ValueError, match="antipode axiom"):
        HopfAlgebra(H.algebra, H.delta, H.eps, S_bad)


def test_dual_cyclic2_comultiplication(corpus):
    H = dual_cyclic2_hopf(P)
    # Delta(d_0) = d_0 x d_0 + d_1 x d_1
    assert H.delta[:, 0].tolist() == [1, 0, 0, 1]
    assert H.delta[:, 1].tolist() == [0, 1, 1, 0]
    assert np.array_equal(H.S, np.eye(2, dtype=np.int64))
