import numpy as np
import pytest

from ewcalc.algebra import ModuleMap, hom_space, is_isomorphic, solve
from ewcalc.coend import (
    Apply,
    Bar,
    BarVar,
    Boxtimes,
    DualVar,
    Fixed,
    HomFrom,
    HomInto,
    Kernel,
    KernelSyntaxError,
    Tensor,
    Var,
    coend,
    coend_over_family,
    dinatural_component,
    end,
    end_over_family,
    eval_kernel,
    eval_kernel_on_map,
    fubini_exchange_check,
    one_probe_violations,
    parse_kernel,
    run_parsed,
)
from ewcalc.hopf import (
    builtin_examples,
    char_module,
    diagonal_tensor_module,
    kappa_dual_module,
    regular_hopf_module,
    sweedler_indecomposables,
    unit_module,
)
from ewcalc.linalg import DEFAULT_PRIME, is_invertible, mm

P = DEFAULT_PRIME


@pytest.fixture(scope="module")
def corpus():
    return builtin_examples(P)


def test_central_end_has_hopf_dimension(corpus):
    # dim of the end of a (x) a^[1] equals dim H
    for name in ("kC2", "kC3", "H4"):
        H = corpus[name]
        res = end(Kernel(H, Tensor([Var(), DualVar(1)])))
        assert res.object.dim == H.n, name


def test_coend_of_identity_kernel_is_trivial_integral(corpus):
    # The identity kernel reads no contravariant slot, so dinaturality along
    # the zero map alone forces every component to vanish: the coend is 0.
    # Exercises the zero-map relation on both routes.
    H = corpus["kC3"]
    res = coend(Kernel(H, Var()))
    simples = [char_module(H, [1, w % P, w * w % P], f"chi{w}")
               for w in (1, 45, 45 * 45 % P)]
    fam = coend_over_family(Kernel(H, Var()), simples + [regular_hopf_module(H)])
    assert res.object.dim == 0
    assert fam.dim == 0


def test_coyoneda_identity_functor(corpus):
    # coend of Hom(a, M) (x) a is M, with the evaluation map as certificate
    for name, M_of in (("kC2", lambda H: char_module(H, [1, P - 1], "sgn")),
                       ("H4", lambda H: regular_hopf_module(H))):
        H = corpus[name]
        M = M_of(H)
        hom = HomInto(M)
        kern = Kernel(H, Tensor([Apply(hom, Var()), Var()]))
        res = coend(kern)
        assert res.object.dim == M.dim
        Preg = regular_hopf_module(H)
        basis = hom.basis(Preg)
        ev = np.zeros((M.dim, len(basis) * Preg.dim), dtype=np.int64)
        for i, phi in enumerate(basis):
            ev[:, i * Preg.dim:(i + 1) * Preg.dim] = phi % P
        assert not np.any(mm(ev, res.presentation.matrix, p=P))
        cert = mm(ev, res.presentation.section, p=P)
        assert is_invertible(cert, P)
        # the certificate intertwines the induced action with M's
        for i in range(H.n):
            lhs = mm(cert, res.object.mats[i], p=P)
            rhs = mm(M.mats[i], cert, p=P)
            assert np.array_equal(lhs, rhs)


def test_one_probe_guard_blocks_lex_integrand(corpus):
    H = corpus["H4"]
    k_plus = unit_module(H)
    k_minus = char_module(H, [1, P - 1, 0, 0], "k-")
    expr = Tensor([Apply(HomInto(k_minus), Var()), Apply(HomFrom(k_plus), Var())])
    bad = one_probe_violations(expr, "coend")
    assert len(bad) == 1
    assert "Hom(k,-)" in bad[0] or "right exact" in bad[0]
    with pytest.raises(ValueError, match="not certified"):
        coend(Kernel(H, expr))


def test_unchecked_one_probe_really_is_wrong_for_sweedler(corpus):
    # the honest reference: coend over the full list of indecomposables
    # equals Hom(k+, k-) = 0 by the co-Yoneda argument, while the naive
    # single-probe quotient reports something nonzero
    H = corpus["H4"]
    inds = sweedler_indecomposables(H)
    k_plus, k_minus = inds[2], inds[3]
    expr = Tensor([Apply(HomInto(k_minus), Var()), Apply(HomFrom(k_plus), Var())])
    kern = Kernel(H, expr)
    naive = coend(kern, check=False)
    fam = coend_over_family(kern, [regular_hopf_module(H)] + inds)
    true_dim = fam.dim
    assert true_dim == 0
    assert naive.object.dim == 1
    assert naive.object.dim != true_dim


def test_one_probe_end_matches_family_for_lex(corpus):
    H = corpus["H4"]
    inds = sweedler_indecomposables(H)
    k_plus, k_minus = inds[2], inds[3]
    expr = Tensor([Bar(Apply(HomFrom(k_minus), Var())),
                   Apply(HomFrom(k_plus), Var())])
    kern = Kernel(H, expr)
    assert one_probe_violations(expr, "end") == []
    res = end(kern)
    from ewcalc.algebra import coregular_module
    Q = coregular_module(H.algebra)
    fam = end_over_family(kern, [Q] + inds)
    assert res.object.dim == fam.dim


def test_rex_coend_agrees_with_family_on_semisimple(corpus):
    H = corpus["kS3"]
    Preg = regular_hopf_module(H)
    m = char_module(H, [1, 1, 1, P - 1, P - 1, P - 1], "sgn")
    kern = Kernel(H, Tensor([Var(), Fixed(m), DualVar(1)]))
    res = coend(kern)
    fam = coend_over_family(kern, [Preg])
    assert res.object.dim == fam.dim
    # adding more objects to the family must not change the answer
    triv = unit_module(H)
    fam2 = coend_over_family(kern, [Preg, triv, m])
    assert fam2.dim == fam.dim


def test_dinaturality_of_components(corpus):
    H = corpus["kC2"]
    kern = Kernel(H, Tensor([Var(), DualVar(1)]))
    res = coend(kern)
    sgn = char_module(H, [1, P - 1], "sgn")
    Preg = regular_hopf_module(H)
    iota_X = dinatural_component(res, sgn)
    iota_P = res.probe_component
    for f in hom_space(Preg, sgn):
        fmap = ModuleMap(Preg, sgn, f)
        first, second = eval_kernel_on_map(kern, fmap)
        # both start at X(sgn, Preg): through X(P,P) and iota_P, or
        # through X(sgn, sgn) and iota_X
        assert np.array_equal(mm(iota_P, first, p=P), mm(iota_X, second, p=P))


def test_end_components_corestrict(corpus):
    H = corpus["kC3"]
    kern = Kernel(H, Tensor([Var(), DualVar(1)]))
    res = end(kern)
    chi = char_module(H, [1, 45, 45 * 45 % P], "chi")
    pi_X = dinatural_component(res, chi)
    from ewcalc.algebra import coregular_module
    from ewcalc.coend import eval_kernel_on_map_into
    Q = coregular_module(H.algebra)
    for f in hom_space(Q, chi):
        fmap = ModuleMap(Q, chi, f)
        co_part, contra_part = eval_kernel_on_map_into(kern, fmap)
        # X(id,f) o pi_Q = X(f,id) o pi_X, both into X(Q, chi)
        lhs = mm(co_part, res.probe_component, p=P)
        rhs = mm(contra_part, pi_X, p=P)
        assert np.array_equal(lhs, rhs)


def test_map_evaluation_is_functorial(corpus):
    H = corpus["kS3"]
    kern = Kernel(H, Tensor([Var(), DualVar(1)]))
    Preg = regular_hopf_module(H)
    rng = np.random.default_rng(11)
    r1 = H.algebra.right_mult_matrix(rng.integers(0, P, size=6))
    r2 = H.algebra.right_mult_matrix(rng.integers(0, P, size=6))
    f = ModuleMap(Preg, Preg, r1)
    g = ModuleMap(Preg, Preg, r2)
    fg = ModuleMap(Preg, Preg, mm(r1, r2, p=P))
    F1, S1 = eval_kernel_on_map(kern, f)
    F2, S2 = eval_kernel_on_map(kern, g)
    F12, S12 = eval_kernel_on_map(kern, fg)
    assert np.array_equal(F12, mm(F2, F1, p=P))
    assert np.array_equal(S12, mm(S1, S2, p=P))


def test_eval_kernel_objects(corpus):
    H = corpus["H4"]
    Preg = regular_hopf_module(H)
    m = char_module(H, [1, P - 1, 0, 0], "k-")
    kern = Kernel(H, Tensor([Var(), Fixed(m), DualVar(1)]))
    X = eval_kernel(kern, Preg)
    direct = diagonal_tensor_module(
        H, Preg, diagonal_tensor_module(H, m, kappa_dual_module(H, Preg, 1)))
    assert X.dim == direct.dim == 16
    assert np.array_equal(X.mats, direct.mats)


def test_boxtimes_and_bar(corpus):
    H = corpus["kC2"]
    kern = Kernel(H, Boxtimes(BarVar(), Var()))
    Preg = regular_hopf_module(H)
    X = eval_kernel(kern, Preg)
    assert X.algebra.n == 4
    assert X.dim == 4
    res = coend(kern)
    # one simple per block on the diagonal: dim = sum over simples of
    # dim(x)^2 = 2 for the 2 characters of C2
    assert res.object.dim == 2


def test_fubini_exchange(corpus):
    for name in ("kC3", "H4"):
        H = corpus[name]
        m = unit_module(H) if name == "kC3" else char_module(H, [1, P - 1, 0, 0], "k-")
        expr = Tensor([Var(0), Var(1), Fixed(m), DualVar(1, 1), DualVar(1, 0)])
        out = fubini_exchange_check(Kernel(H, expr, nvars=2))
        assert out.ok, name
        assert out.dim > 0


def test_parser_round_trip(corpus):
    H = corpus["kC2"]
    m = unit_module(H)
    parsed = parse_kernel("coend[a]( act(a) * fixed(m) * ract(dual(a,1)) )",
                          H, {"m": m})
    assert parsed.kind == "coend"
    assert parsed.var_names == ("a",)
    res = run_parsed(parsed, H)
    # semisimple: one summand x (x) m (x) x* per simple, each of dim 1
    assert res.object.dim == 2
    ended = run_parsed(parse_kernel("end[a]( act(a) * fixed(m) * ract(dual(a,1)) )",
                                    H, {"m": m}), H)
    assert ended.object.dim == 2


def test_parser_errors(corpus):
    H = corpus["kC2"]
    with pytest.raises(KernelSyntaxError, match="unknown name 'b'"):
        parse_kernel("coend[a]( act(b) )", H, {})
    with pytest.raises(KernelSyntaxError, match="position"):
        parse_kernel("coend[a]( act(a) ", H, {})
    with pytest.raises(KernelSyntaxError, match="coend or end"):
        parse_kernel("integral[a]( act(a) )", H, {})
    with pytest.raises(KernelSyntaxError, match="unknown module"):
        parse_kernel("coend[a]( fixed(zz) )", H, {})
