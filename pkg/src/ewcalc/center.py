"""Twisted central comonads and monads over a finite-dimensional Hopf algebra.

For an even twist kappa, the sandwich kernels z (x) m (x) z^[kappa-1]
and z (x) m (x) z^[kappa-3] have, respectively, an end Z(m) and a coend
T(m) over the bound variable z.  Z is a comonad, T is a monad, T is left
adjoint to Z, and T applied to the regular module is an algebra E whose
modules are exactly the balancings of the matching twist: the dictionary
in both directions is implemented here with explicit matrices, and every
structural law (counit, coassociativity, unit, associativity, triangle
identities) is checked exactly rather than assumed.

Two presentation conventions are fixed once and used throughout.  First,
all integrals are one-probe presentations inherited from the engine: an
end lives inside Q (x) m (x) Q^[kappa-1] with Q the coregular module, a
coend is a quotient of P (x) m (x) P^[kappa-3] with P the regular one.
Second, in any iterated structure map the OUTER copy of the variable is
the first tensor factor, which pairs it with the LAST dual factor; the
odd dual of a tensor product reverses factors with plain coordinate
swap, so outer/inner bookkeeping is a permutation of kron slots and
nothing else.

Structure maps at objects other than the probe are never recomputed
from an enlarged presentation (that route is quadratic in the probe
dimension); instead they are solved from a free embedding or a free
cover of the object, using that the wedge at a free module is block
diagonal in the probe wedge.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algebra import (
    Algebra,
    Bimodule,
    Module,
    coregular_module,
    is_isomorphic,
    linear_dual_module,
    opposite_algebra,
    tensor_algebra,
)
from .balance import (
    Balancing,
    DiagonalActions,
    VerificationReport,
    balancing_component,
    cover_by_free,
    embed_into_free,
    solve_balancings,
    verify_balancing,
)
from .coend import (
    DualVar,
    Fixed,
    IntegralResult,
    Kernel,
    KernelFunctor,
    Tensor,
    Var,
    coend,
    end,
)
from .decompose import is_semisimple, module_multiplicities, simple_modules
from .functors import CheckResult
from .hopf import (
    HopfAlgebra,
    diagonal_tensor_module,
    distinguished_data,
    kappa_dual_module,
    regular_hopf_module,
    right_coev,
    right_ev,
    unit_module,
)
from .linalg import kernel_basis, kron, kron_all, kron_swap_perm, mm, solve


# ------------------------------------------------ components off the probe

_COREG_ISO: dict[bytes, np.ndarray] = {}


def _coreg_iso(H: HopfAlgebra) -> np.ndarray:
    """A fixed module isomorphism from the regular to the coregular module.

    Existence is the Frobenius property; any choice works because it is
    only used to turn a free embedding X -> P^t into one into Q^t.
    """
    key = H.algebra.c.tobytes() + H.S.tobytes()
    if key not in _COREG_ISO:
        r = is_isomorphic(regular_hopf_module(H), coregular_module(H.algebra))
        if not r:
            raise AssertionError("regular and coregular modules are not isomorphic")
        _COREG_ISO[key] = r.f
    return _COREG_ISO[key]


def _sandwich_parts(res: IntegralResult) -> tuple[HopfAlgebra, Module, int]:
    expr = res.kernel.expr
    ok = (
        isinstance(expr, Tensor)
        and len(expr.children) == 3
        and isinstance(expr.children[0], Var)
        and isinstance(expr.children[1], Fixed)
        and isinstance(expr.children[2], DualVar)
        and expr.children[2].kappa % 2 == 1
        and res.kernel.nvars == 1
    )
    if not ok:
        raise ValueError("component formulas apply to sandwich kernels "
                         "z (x) m (x) z^[odd] only")
    return res.kernel.H, expr.children[1].module, expr.children[2].kappa


def end_component(res: IntegralResult, X: Module) -> np.ndarray:
    """Wedge of a sandwich end at X: a matrix object -> X (x) m (x) X^[j].

    Solved from a free embedding e: X -> Q^t.  The wedge at Q^t is block
    diagonal in the probe wedge, and dinaturality along e reads
    (e (x) 1 (x) 1) . pi_X = (1 (x) 1 (x) e^T) . pi_{Q^t}, which pins
    pi_X down uniquely because the left factor is injective.
    """
    if res.kind != "end":
        raise ValueError("end_component needs an end presentation")
    H, m, _ = _sandwich_parts(res)
    p, n, dm, dX = H.p, H.n, m.dim, X.dim
    iota = res.probe_component
    dE = iota.shape[1]
    if np.array_equal(X.mats, coregular_module(H.algebra).mats):
        return iota % p
    e0, t = embed_into_free(H, X)
    e = mm(kron(np.eye(t, dtype=np.int64), _coreg_iso(H), p), e0, p=p)
    piQ = iota.reshape(n, dm, n, dE)
    er = e.reshape(t, n, dX)
    rhs = np.einsum("qwbr,sbx->sqwxr", piQ, er) % p
    k = dm * dX
    sol = solve(e, rhs.reshape(t * n, k * dE), p=p)
    if sol is None:
        raise AssertionError("end wedge does not factor through the free embedding")
    return sol.reshape(dX * k, dE) % p


def coend_component(res: IntegralResult, X: Module) -> np.ndarray:
    """Wedge of a sandwich coend at X: a matrix X (x) m (x) X^[j] -> object.

    Mirror of `end_component` through a free cover c: P^t -> X; here the
    probe already is the regular module, so no regular/coregular
    identification is needed.
    """
    if res.kind != "coend":
        raise ValueError("coend_component needs a coend presentation")
    H, m, _ = _sandwich_parts(res)
    p, n, dm, dX = H.p, H.n, m.dim, X.dim
    q = res.probe_component
    dC = q.shape[0]
    if np.array_equal(X.mats, regular_hopf_module(H).mats):
        return q % p
    c0, t = cover_by_free(H, X)
    qres = q.reshape(dC, n, dm, n)
    c0r = c0.reshape(dX, t, n)
    R = np.einsum("cqwb,xsb->csqwx", qres, c0r) % p
    k = dm * dX
    rhs = np.transpose(R, (1, 2, 3, 4, 0)).reshape(t * n, k * dC)
    sol = solve(c0.T % p, rhs, p=p)
    if sol is None:
        raise AssertionError("coend wedge does not factor through the free cover")
    return sol.reshape(dX * k, dC).T % p


# ------------------------------------------------ the comonad and the monad


class CentralComonad(KernelFunctor):
    """Z(m) = end over z of z (x) m (x) z^[kappa-1], with counit and
    comultiplication solved from their defining wedge equations.

    The class doubles as a kernel functor (left exact, covariant) so it
    can be wrapped into Apply nodes of other kernels.
    """

    variance = "co"
    is_lex = True
    is_rex = False

    def __init__(self, H: HopfAlgebra, kappa: int = 2):
        if kappa % 2:
            raise ValueError("the twist of a central comonad must be even")
        self.H = H
        self.kappa = int(kappa)
        self.name = f"Z_[{kappa}]"
        self.target_algebra = H.algebra
        self._results: dict[bytes, IntegralResult] = {}
        self._deltas: dict[bytes, np.ndarray] = {}

    def kernel(self, m: Module) -> Kernel:
        return Kernel(self.H, Tensor([Var(), Fixed(m), DualVar(self.kappa - 1)]))

    def result(self, m: Module) -> IntegralResult:
        key = m.mats.tobytes()
        if key not in self._results:
            self._results[key] = end(self.kernel(m))
        return self._results[key]

    def on_object(self, m: Module) -> Module:
        return self.result(m).object

    def inclusion(self, m: Module) -> np.ndarray:
        return self.result(m).probe_component

    def component(self, m: Module, X: Module) -> np.ndarray:
        return end_component(self.result(m), X)

    def on_map(self, f: np.ndarray, src: Module, tgt: Module) -> np.ndarray:
        p, n = self.H.p, self.H.n
        eye_n = np.eye(n, dtype=np.int64)
        rhs = mm(kron_all([eye_n, np.asarray(f), eye_n], p), self.inclusion(src), p=p)
        out = solve(self.inclusion(tgt), rhs, p=p)
        if out is None:
            raise AssertionError("image of the map left the end")
        return out % p

    def counit(self, m: Module) -> np.ndarray:
        return self.component(m, unit_module(self.H))

    def comultiplication(self, m: Module) -> np.ndarray:
        """delta: Z(m) -> Z(Z(m)), from the double-wedge factorization.

        At the probe pair the composite wedge of Z along Q (x) Q equals
        the iterated wedge up to the outer-first regrouping, which on
        coordinates is the swap of the two dual slots.
        """
        key = m.mats.tobytes()
        if key in self._deltas:
            return self._deltas[key]
        H, p, n = self.H, self.H.p, self.H.n
        res1 = self.result(m)
        i1 = res1.probe_component
        i2 = self.inclusion(res1.object)
        Q = coregular_module(H.algebra)
        QQ = diagonal_tensor_module(H, Q, Q)
        piQQ = end_component(res1, QQ)
        eye_n = np.eye(n, dtype=np.int64)
        pre = np.eye(n * n * m.dim, dtype=np.int64)
        B = mm(kron(pre, kron_swap_perm(n, n), p), piQQ, p=p)
        A = mm(kron_all([eye_n, i1, eye_n], p), i2, p=p)
        delta = solve(A, B, p=p)
        if delta is None:
            raise AssertionError("double wedge does not factor through Z(Z(m))")
        self._deltas[key] = delta % p
        return self._deltas[key]

    def check_laws(self, m: Module) -> VerificationReport:
        """Counit laws and coassociativity, all exact.

        Coassociativity is decided without ever presenting Z^3: both
        sides are composed with the injective comparison into the
        iterated probe expansion, where they reduce to expressions in
        the data of Z and Z^2 alone.
        """
        H, p, n = self.H, self.H.p, self.H.n
        problems: list[str] = []
        res1 = self.result(m)
        Zm = res1.object
        dZ = Zm.dim
        delta = self.comultiplication(m)
        eye_Z = np.eye(dZ, dtype=np.int64)
        if not np.array_equal(mm(self.counit(Zm), delta, p=p), eye_Z):
            problems.append("counit fails on the outer copy")
        Zeps = self.on_map(self.counit(m), Zm, m)
        if not np.array_equal(mm(Zeps, delta, p=p), eye_Z):
            problems.append("counit fails on the inner copy")
        eye_n = np.eye(n, dtype=np.int64)
        u = mm(self.inclusion(Zm), delta, p=p)
        side1 = mm(kron_all([eye_n, u, eye_n], p), u, p=p)
        Q = coregular_module(H.algebra)
        QQ = diagonal_tensor_module(H, Q, Q)
        piQQ2 = end_component(self.result(Zm), QQ)
        pre = np.eye(n * n * dZ, dtype=np.int64)
        side2 = mm(kron(pre, kron_swap_perm(n, n), p), piQQ2, delta, p=p)
        if not np.array_equal(side1, side2):
            problems.append("comultiplication is not coassociative")
        return VerificationReport(not problems, problems)


class CentralMonad(KernelFunctor):
    """T(m) = coend over z of z (x) m (x) z^[kappa-3]; left adjoint of the
    comonad with the same twist, and a monad through that adjunction."""

    variance = "co"
    is_lex = False
    is_rex = True

    def __init__(self, H: HopfAlgebra, kappa: int = 2):
        if kappa % 2:
            raise ValueError("the twist of a central monad must be even")
        self.H = H
        self.kappa = int(kappa)
        self.name = f"Z^[{kappa}]"
        self.target_algebra = H.algebra
        self._results: dict[bytes, IntegralResult] = {}
        self._mus: dict[bytes, np.ndarray] = {}

    def kernel(self, m: Module) -> Kernel:
        return Kernel(self.H, Tensor([Var(), Fixed(m), DualVar(self.kappa - 3)]))

    def result(self, m: Module) -> IntegralResult:
        key = m.mats.tobytes()
        if key not in self._results:
            self._results[key] = coend(self.kernel(m))
        return self._results[key]

    def on_object(self, m: Module) -> Module:
        return self.result(m).object

    def projection(self, m: Module) -> np.ndarray:
        return self.result(m).probe_component

    def section(self, m: Module) -> np.ndarray:
        return self.result(m).presentation.section

    def component(self, m: Module, X: Module) -> np.ndarray:
        return coend_component(self.result(m), X)

    def on_map(self, f: np.ndarray, src: Module, tgt: Module) -> np.ndarray:
        p, n = self.H.p, self.H.n
        eye_n = np.eye(n, dtype=np.int64)
        rhs = mm(self.projection(tgt), kron_all([eye_n, np.asarray(f), eye_n], p), p=p)
        out = solve(self.projection(src).T % p, rhs.T % p, p=p)
        if out is None:
            raise AssertionError("image of the map does not descend to the coend")
        return out.T % p

    def unit(self, m: Module) -> np.ndarray:
        return self.component(m, unit_module(self.H))

    def multiplication(self, m: Module) -> np.ndarray:
        """mu: T(T(m)) -> T(m), from the epi side of the double wedge."""
        key = m.mats.tobytes()
        if key in self._mus:
            return self._mus[key]
        H, p, n = self.H, self.H.p, self.H.n
        res1 = self.result(m)
        q1 = res1.probe_component
        q2 = self.projection(res1.object)
        eye_n = np.eye(n, dtype=np.int64)
        E = mm(q2, kron_all([eye_n, q1, eye_n], p), p=p)
        P = regular_hopf_module(H)
        PP = diagonal_tensor_module(H, P, P)
        iPP = coend_component(res1, PP)
        pre = np.eye(n * n * m.dim, dtype=np.int64)
        R = mm(iPP, kron(pre, kron_swap_perm(n, n), p), p=p)
        mu = solve(E.T % p, R.T % p, p=p)
        if mu is None:
            raise AssertionError("double wedge does not descend to T(T(m))")
        self._mus[key] = mu.T % p
        return self._mus[key]

    def check_laws(self, m: Module) -> VerificationReport:
        """Unit laws and associativity; associativity never builds T^3."""
        H, p, n = self.H, self.H.p, self.H.n
        problems: list[str] = []
        res1 = self.result(m)
        Tm = res1.object
        dT = Tm.dim
        mu = self.multiplication(m)
        eye_T = np.eye(dT, dtype=np.int64)
        if not np.array_equal(mm(mu, self.unit(Tm), p=p), eye_T):
            problems.append("unit fails on the outer copy")
        Teta = self.on_map(self.unit(m), m, Tm)
        if not np.array_equal(mm(mu, Teta, p=p), eye_T):
            problems.append("unit fails on the inner copy")
        eye_n = np.eye(n, dtype=np.int64)
        M1 = mm(mu, self.projection(Tm), p=p)
        sideA = mm(M1, kron_all([eye_n, M1, eye_n], p), p=p)
        P = regular_hopf_module(H)
        PP = diagonal_tensor_module(H, P, P)
        iPP2 = coend_component(self.result(Tm), PP)
        pre = np.eye(n * n * dT, dtype=np.int64)
        sideB = mm(mu, iPP2, kron(pre, kron_swap_perm(n, n), p), p=p)
        if not np.array_equal(sideA, sideB):
            problems.append("multiplication is not associative")
        return VerificationReport(not problems, problems)


# --------------------------------------------------------- the adjunction


class CentralAdjunction:
    """The adjunction T -| Z between the central monad and comonad of one
    twist, with unit, counit, both mates, and the triangle identities.

    Counit and unit are solved from evaluation/coevaluation sandwiches:
    e.g. the counit T(Z(m)) -> m descends from the wedge that feeds the
    component of Z at P^[-1] into the two right evaluations flanking m.
    """

    def __init__(self, H: HopfAlgebra, kappa: int = 2,
                 monad: CentralMonad | None = None,
                 comonad: CentralComonad | None = None):
        self.H = H
        self.kappa = int(kappa)
        self.monad = monad or CentralMonad(H, kappa)
        self.comonad = comonad or CentralComonad(H, kappa)
        if self.monad.kappa != self.kappa or self.comonad.kappa != self.kappa:
            raise ValueError("monad and comonad twists must agree")
        self._counits: dict[bytes, np.ndarray] = {}
        self._units: dict[bytes, np.ndarray] = {}

    def counit(self, m: Module) -> np.ndarray:
        """eps: T(Z(m)) -> m."""
        key = m.mats.tobytes()
        if key in self._counits:
            return self._counits[key]
        H, p, n, kappa = self.H, self.H.p, self.H.n, self.kappa
        P = regular_hopf_module(H)
        X1 = kappa_dual_module(H, P, -1)
        piX1 = end_component(self.comonad.result(m), X1)
        ev1 = right_ev(X1)
        ev2 = right_ev(kappa_dual_module(H, P, kappa - 3))
        eye_n = np.eye(n, dtype=np.int64)
        eye_m = np.eye(m.dim, dtype=np.int64)
        eP = mm(kron_all([ev1, eye_m, ev2], p),
                kron_all([eye_n, piX1, eye_n], p), p=p)
        q = self.monad.projection(self.comonad.on_object(m))
        out = solve(q.T % p, eP.T % p, p=p)
        if out is None:
            raise AssertionError("adjunction counit does not descend to T(Z(m))")
        self._counits[key] = out.T % p
        return self._counits[key]

    def unit(self, m: Module) -> np.ndarray:
        """eta: m -> Z(T(m))."""
        key = m.mats.tobytes()
        if key in self._units:
            return self._units[key]
        H, p, n, kappa = self.H, self.H.p, self.H.n, self.kappa
        Q = coregular_module(H.algebra)
        resT = self.monad.result(m)
        X = kappa_dual_module(H, Q, 1)
        iX = coend_component(resT, X)
        coev1 = right_coev(Q).reshape(n, n)
        coev2 = right_coev(kappa_dual_module(H, Q, kappa - 2)).reshape(n, n)
        eye_m = np.eye(m.dim, dtype=np.int64)
        M1 = np.einsum("ab,wv,cd->abwcdv", coev1, eye_m, coev2) % p
        M1 = M1.reshape(n * n * m.dim * n * n, m.dim)
        eye_n = np.eye(n, dtype=np.int64)
        g = mm(kron_all([eye_n, iX, eye_n], p), M1, p=p)
        out = solve(self.comonad.inclusion(resT.object), g, p=p)
        if out is None:
            raise AssertionError("adjunction unit does not land in Z(T(m))")
        self._units[key] = out % p
        return self._units[key]

    def left_mate(self, phi: np.ndarray, src: Module, W: Module) -> np.ndarray:
        """Hom(src, Z(W)) -> Hom(T(src), W): eps_W after T(phi)."""
        ZW = self.comonad.on_object(W)
        return mm(self.counit(W), self.monad.on_map(phi, src, ZW), p=self.H.p)

    def right_mate(self, psi: np.ndarray, src: Module, W: Module) -> np.ndarray:
        """Hom(T(src), W) -> Hom(src, Z(W)): Z(psi) after eta_src."""
        Tsrc = self.monad.on_object(src)
        return mm(self.comonad.on_map(psi, Tsrc, W), self.unit(src), p=self.H.p)

    def check_triangles(self, m: Module) -> VerificationReport:
        p = self.H.p
        problems: list[str] = []
        Tm = self.monad.on_object(m)
        Zm = self.comonad.on_object(m)
        Teta = self.monad.on_map(self.unit(m), m, self.comonad.on_object(Tm))
        if not np.array_equal(mm(self.counit(Tm), Teta, p=p),
                              np.eye(Tm.dim, dtype=np.int64)):
            problems.append("triangle on T fails")
        Zeps = self.comonad.on_map(self.counit(m), self.monad.on_object(Zm), m)
        if not np.array_equal(mm(Zeps, self.unit(Zm), p=p),
                              np.eye(Zm.dim, dtype=np.int64)):
            problems.append("triangle on Z fails")
        return VerificationReport(not problems, problems)


def _sandwich_shift_pair(expr: KernelFunctor) -> tuple[int, int]:
    raise NotImplementedError


def comonad_transpose_check(H: HopfAlgebra, m: Module,
                            kappa: int = 2, seed: int = 0) -> CheckResult:
    """The adjoint of Z_[kappa] is the central monad, in all three guises.

    Three coend kernels present it: the engine's z (x) m (x) z^[kappa-3],
    the mate-derived z^[1] (x) m (x) z^[kappa-2] (odd slot first), and
    the shifted-label z^[2-kappa] (x) m (x) z^[-1].  Reindexing the bound
    variable by an even dual adds a constant to both shifts, and moving
    the odd slot across m costs one more, so a sandwich coend is
    classified by (last shift) - (first shift): all three kernels give
    kappa - 3.  That syntactic identity is checked here together with a
    numeric certificate on m; at kappa = 2 the first and third kernel
    even agree coordinate by coordinate.
    """
    if kappa % 2:
        raise ValueError("even twists only")
    p = H.p
    k1 = Kernel(H, Tensor([Var(), Fixed(m), DualVar(kappa - 3)]))
    k2 = Kernel(H, Tensor([DualVar(2 - kappa), Fixed(m), DualVar(-1)]))
    kla = Kernel(H, Tensor([DualVar(1), Fixed(m), DualVar(kappa - 2)]))
    inv1 = (kappa - 3) - 0
    inv2 = (-1) - (2 - kappa)
    invla = (kappa - 2) - 1
    if not inv1 == inv2 == invla:
        return CheckResult(False, -1, status="shift invariants disagree")
    c1, c2, cla = coend(k1), coend(k2), coend(kla)
    dims = {c1.object.dim, c2.object.dim, cla.object.dim}
    if len(dims) != 1:
        return CheckResult(False, c1.object.dim, status="dimensions disagree")
    if kappa == 2:
        ok = (np.array_equal(c1.object.mats, c2.object.mats)
              and np.array_equal(c1.probe_component, c2.probe_component))
        if not ok:
            return CheckResult(False, c1.object.dim,
                               status="presentations differ at twist 2")
    r12 = is_isomorphic(c1.object, c2.object, seed=seed)
    rla = is_isomorphic(c1.object, cla.object, seed=seed)
    ok = bool(r12) and bool(rla)
    status = "" if ok else (r12.status if not r12 else rla.status)
    return CheckResult(ok, c1.object.dim, certificate=r12.f, status=status)


# ------------------------------------------------ the algebra on T(H)


@dataclass
class CenterAlgebra:
    """T(H) with its convolution-style algebra structure.

    `algebra` holds the structure constants on the coend object,
    `module` the same space with its diagonal H-action, and `unit_map`
    the algebra map from H induced by the monad unit at the regular
    module.
    """

    H: HopfAlgebra
    kappa: int
    monad: CentralMonad
    comonad: CentralComonad
    result: IntegralResult
    algebra: Algebra
    module: Module
    unit_map: np.ndarray


_CENTER_CACHE: dict[tuple[bytes, bytes, int, int], CenterAlgebra] = {}


def center_algebra(H: HopfAlgebra, kappa: int = 2) -> CenterAlgebra:
    """Build T(H) as an algebra from representative-level products.

    For x, y in T(H) the product is mu(T(lambda_y)(x)) with lambda_y the
    module map h -> h |> y.  Composing the defining equations of mu and
    of T on maps telescopes to a formula entirely inside the probe
    presentation of T(H):

        x . y  =  iota_{P(x)P} . swap . (1 (x) s lambda_y (x) 1) . s x,

    so neither T(T(H)) nor mu is ever materialized.  The unit is the
    monad unit of the unit element; associativity and unitality are
    validated by the Algebra constructor, and multiplicativity of the
    induced map from H is asserted on basis pairs.
    """
    key = (H.algebra.c.tobytes(), H.S.tobytes(), H.p, int(kappa))
    if key in _CENTER_CACHE:
        return _CENTER_CACHE[key]
    p, n = H.p, H.n
    T = CentralMonad(H, kappa)
    Z = CentralComonad(H, kappa)
    P = regular_hopf_module(H)
    res = T.result(P)
    E_mod = res.object
    dE = E_mod.dim
    s1 = res.presentation.section
    PP = diagonal_tensor_module(H, P, P)
    iPP = coend_component(res, PP)
    pre = np.eye(n * n * n, dtype=np.int64)
    B = mm(iPP, kron(pre, kron_swap_perm(n, n), p), p=p)
    Br = B.reshape(dE, n, n ** 3, n)
    c = np.zeros((dE, dE, dE), dtype=np.int64)
    for k in range(dE):
        lam = E_mod.mats[:, :, k].T % p
        Sk = mm(s1, lam, p=p)
        Ck = np.einsum("EiMj,Ma->Eiaj", Br, Sk).reshape(dE, n ** 3) % p
        Rk = mm(Ck, s1, p=p)
        c[:, k, :] = Rk.T
    eta = T.unit(P)
    u = mm(eta, H.algebra.unit.reshape(n, 1), p=p).ravel()
    E = Algebra(c, u, p, name=f"E{kappa}({H.name})")
    for g in range(n):
        for h in range(n):
            gh = H.algebra.c[g, h, :] % p
            lhs = mm(eta, gh.reshape(n, 1), p=p).ravel()
            rhs = E.multiply(eta[:, g], eta[:, h])
            if not np.array_equal(lhs, rhs):
                raise AssertionError("monad unit is not multiplicative on T(H)")
    ca = CenterAlgebra(H, int(kappa), T, Z, res, E, E_mod, eta % p)
    _CENTER_CACHE[key] = ca
    return ca


def center_product_via_monad(ca: CenterAlgebra, x: np.ndarray,
                             y: np.ndarray) -> np.ndarray:
    """x . y computed the slow way, through T on maps and mu.

    Independent of the representative-level formula in center_algebra;
    the two routes are compared in tests.
    """
    H = ca.H
    p = H.p
    P = regular_hopf_module(H)
    lam = np.einsum("hwk,k->wh", ca.module.mats, np.asarray(y)) % p
    TL = ca.monad.on_map(lam, P, ca.module)
    mu = ca.monad.multiplication(P)
    return mm(mu, TL, np.asarray(x).reshape(-1, 1), p=p).ravel()


# ------------------------------------------------ balancings as modules


def balancing_to_action(ca: CenterAlgebra, b: Balancing) -> np.ndarray:
    """The monad action T(m) -> m encoding a balancing.

    The component of the balancing at P^[kappa-2] followed by the right
    evaluation of P^[kappa-3] is a wedge on the coend probe; the action
    is its descent.
    """
    if b.kappa != ca.kappa:
        raise ValueError("balancing twist does not match the center twist")
    H, p, n = ca.H, ca.H.p, ca.H.n
    m = b.carrier
    P = regular_hopf_module(H)
    sig = balancing_component(b, kappa_dual_module(H, P, ca.kappa - 2))
    ev = right_ev(kappa_dual_module(H, P, ca.kappa - 3))
    eye_m = np.eye(m.dim, dtype=np.int64)
    eye_n = np.eye(n, dtype=np.int64)
    aP = mm(kron(eye_m, ev, p), kron(sig, eye_n, p), p=p)
    q = ca.monad.projection(m)
    out = solve(q.T % p, aP.T % p, p=p)
    if out is None:
        raise AssertionError("balancing wedge does not descend to T(m)")
    return out.T % p


def action_to_module(ca: CenterAlgebra, m: Module, alpha: np.ndarray) -> Module:
    """The module over center_algebra carried by a monad action on m."""
    H, p = ca.H, ca.H.p
    P = regular_hopf_module(H)
    dm, dE = m.dim, ca.algebra.n
    cols = []
    for s in range(dm):
        rho = m.mats[:, :, s].T % p
        cols.append(mm(alpha, ca.monad.on_map(rho, P, m), p=p))
    mats = np.transpose(np.stack(cols, axis=0), (2, 1, 0)) % p
    V = Module(ca.algebra, mats, name=f"{m.name}~central", check=True)
    restr = np.einsum("kh,kws->hws", ca.unit_map, mats) % p
    if not np.array_equal(restr, m.mats % p):
        raise AssertionError("central action does not restrict to the original one")
    return V


def module_to_action(ca: CenterAlgebra, V: Module) -> tuple[Module, np.ndarray]:
    """Underlying H-module and monad action of a center_algebra module."""
    H, p, n = ca.H, ca.H.p, ca.H.n
    dE, dV = ca.algebra.n, V.dim
    restr = np.einsum("kh,kws->hws", ca.unit_map, V.mats) % p
    m = Module(H.algebra, restr, name=f"{V.name}|H", check=True)
    qE = ca.result.probe_component.reshape(dE, n, n, n)
    W1 = np.einsum("khuf,u->khf", qE, H.algebra.unit % p) % p
    aP = np.einsum("khf,kws->whsf", W1, V.mats).reshape(dV, n * dV * n) % p
    q = ca.monad.projection(m)
    out = solve(q.T % p, aP.T % p, p=p)
    if out is None:
        raise AssertionError("central action is not dinatural over the coend")
    return m, out.T % p


def action_to_balancing(ca: CenterAlgebra, m: Module,
                        alpha: np.ndarray) -> Balancing:
    """Balancing recovered from a monad action, verified before returning.

    The action at the component of T(m) over P^[2-kappa] composes with a
    right coevaluation to the balancing's component at the regular
    module; `verify_balancing` then certifies naturality, coherence and
    invertibility, so a silent mismatch cannot escape.
    """
    H, p, n = ca.H, ca.H.p, ca.H.n
    dm = m.dim
    P = regular_hopf_module(H)
    X = kappa_dual_module(H, P, 2 - ca.kappa)
    iX = coend_component(ca.monad.result(m), X)
    aX = mm(alpha, iX, p=p)
    coev = right_coev(kappa_dual_module(H, P, -1)).reshape(n, n)
    sigma = np.einsum("wxvc,cb->wbxv", aX.reshape(dm, n, dm, n), coev) % p
    sigma = sigma.reshape(dm * n, n * dm)
    b = Balancing(DiagonalActions(H), m, sigma, ca.kappa)
    rep = verify_balancing(b)
    if not rep.ok:
        raise AssertionError("recovered balancing failed verification: "
                             + "; ".join(rep.problems))
    return b


def balancing_to_module(ca: CenterAlgebra, b: Balancing) -> Module:
    return action_to_module(ca, b.carrier, balancing_to_action(ca, b))


def module_to_balancing(ca: CenterAlgebra, V: Module) -> Balancing:
    m, alpha = module_to_action(ca, V)
    return action_to_balancing(ca, m, alpha)


# ------------------------------------------------ monad modules on bimodules


def solve_monad_modules(monad: CentralMonad, W: Bimodule,
                        limit: int = 200000) -> list[np.ndarray]:
    """All monad actions T(W) -> W that are maps of bimodules.

    Left H-linearity, right equivariance and the unit law are affine
    conditions on the action matrix and are solved exactly;
    associativity is quadratic and is filtered by enumeration, using
    that T on maps is itself linear, so T of every affine generator is
    solved once.  Raises RuntimeError when the affine space is too large
    to enumerate within `limit` candidates.
    """
    H = monad.H
    p = H.p
    w = W.left_module()
    TW = monad.on_object(w)
    dW, dTW = w.dim, TW.dim
    eye_W = np.eye(dW, dtype=np.int64)
    eye_TW = np.eye(dTW, dtype=np.int64)
    rows = []
    for h in range(H.n):
        rows.append((kron(w.mats[h], eye_TW, p)
                     - kron(eye_W, TW.mats[h].T % p, p)) % p)
    for bidx in range(W.right_algebra.n):
        rb = W.right_mats[bidx]
        Trb = monad.on_map(rb, w, w)
        rows.append((kron(rb, eye_TW, p) - kron(eye_W, Trb.T % p, p)) % p)
    eta = monad.unit(w)
    rows.append(kron(eye_W, eta.T % p, p))
    A = np.vstack(rows) % p
    rhs = np.zeros((A.shape[0], 1), dtype=np.int64)
    rhs[-dW * dW:, 0] = eye_W.ravel()
    part = solve(A, rhs, p=p)
    if part is None:
        return []
    null = kernel_basis(A[:-dW * dW] if False else A, p=p)
    k = null.shape[1]
    if p ** k > limit:
        raise RuntimeError(
            f"affine space of monad actions too large to enumerate ({p}^{k})")
    alpha0 = part.reshape(dW, dTW) % p
    dirs = [null[:, i].reshape(dW, dTW) % p for i in range(k)]
    mu = monad.multiplication(w)
    T0 = monad.on_map(alpha0, TW, w)
    Tdirs = [monad.on_map(d, TW, w) for d in dirs]
    out = []
    for coeffs in itertools.product(range(p), repeat=k):
        alpha = alpha0.copy()
        Talpha = T0.copy()
        for ci, d, Td in zip(coeffs, dirs, Tdirs):
            if ci:
                alpha = (alpha + ci * d) % p
                Talpha = (Talpha + ci * Td) % p
        if np.array_equal(mm(alpha, Talpha, p=p), mm(alpha, mu, p=p)):
            out.append(alpha)
    return out


# ------------------------------------------------ the semisimple census


@dataclass
class SemisimpleCenterReport:
    ok: bool
    simple_dims: list[int]
    hopf_simples: list[Module]
    pair_matrix: np.ndarray
    end_dim: int
    coend_dim: int
    problems: list[str]

    def __bool__(self) -> bool:
        return self.ok


def semisimple_center_check(H: HopfAlgebra, kappa: int = 2,
                            seed: int = 0) -> SemisimpleCenterReport:
    """Decompose T(H) over H^op (x) H and census its simple modules.

    T(H) carries the diagonal action and, commuting with it, the descent
    of right multiplication on the middle slot; together they make it a
    module over H^op (x) H, built here with full constructor checks.
    pair_matrix[i, j] is the multiplicity of dual(s_i) boxtimes s_j in
    that module, indexed by `hopf_simples`; simple_dims is the sorted
    list of dimensions of the simple modules of the algebra T(H) itself.
    """
    if not is_semisimple(H.algebra):
        raise ValueError("the sandwich census needs a semisimple Hopf algebra")
    p, n = H.p, H.n
    ca = center_algebra(H, kappa)
    dE = ca.algebra.n
    problems: list[str] = []
    simple_dims = sorted(s.dim for s in simple_modules(ca.algebra, seed=seed))
    P = regular_hopf_module(H)
    rights = [np.asarray(r) % p for r in H.algebra.basis_right_mults()]
    op_mats = [ca.monad.on_map(r, P, P) for r in rights]
    T2 = tensor_algebra(opposite_algebra(H.algebra), H.algebra)
    mats2 = np.zeros((T2.n, dE, dE), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            mats2[i * n + j] = mm(op_mats[i], ca.module.mats[j], p=p)
    E2 = Module(T2, mats2, name="T(H) over Hop(x)H", check=True)
    mult = module_multiplicities(T2, E2)
    simples2 = simple_modules(T2, seed=seed)
    simplesH = simple_modules(H.algebra, seed=seed)
    nS = len(simplesH)
    boxes = {}
    for i, si in enumerate(simplesH):
        di = linear_dual_module(si)
        for j, sj in enumerate(simplesH):
            bm = np.zeros((T2.n, si.dim * sj.dim, si.dim * sj.dim),
                          dtype=np.int64)
            for a in range(n):
                for bgen in range(n):
                    bm[a * n + bgen] = kron(di.mats[a], simplesH[j].mats[bgen], p)
            boxes[(i, j)] = Module(T2, bm, name=f"dual(s{i}) box s{j}",
                                   check=False)
    pair_matrix = np.zeros((nS, nS), dtype=np.int64)
    used = set()
    for (i, j), bx in boxes.items():
        hits = [l for l, s2 in enumerate(simples2)
                if bool(is_isomorphic(bx, s2, seed=seed))]
        if len(hits) != 1:
            problems.append(f"pair ({i},{j}) matched {len(hits)} blocks")
            continue
        pair_matrix[i, j] = mult[hits[0]]
        used.add(hits[0])
    if len(used) != len(simples2):
        problems.append("some blocks of Hop (x) H were not matched by a pair")
    end_dim = ca.comonad.on_object(P).dim
    if end_dim != dE:
        problems.append(f"end dimension {end_dim} differs from coend {dE}")
    total = sum(int(pair_matrix[i, j]) * simplesH[i].dim * simplesH[j].dim
                for i in range(nS) for j in range(nS))
    if total != dE:
        problems.append("multiplicities do not exhaust T(H)")
    return SemisimpleCenterReport(not problems, simple_dims, simplesH,
                                  pair_matrix, end_dim, dE, problems)


# ------------------------------------------------ the distinguished shift


@dataclass
class ShiftCheckReport:
    ok: bool
    mode: str                       # "involutive" | "twisted"
    twist_dim: int                  # dimension of the natural family space
    counts: list[tuple[int, int]]   # per carrier: solutions at 0 and at 4
    problems: list[str]

    def __bool__(self) -> bool:
        return self.ok


def _twist_family(H: HopfAlgebra, D: Module) -> np.ndarray:
    """Natural H-linear family a^[-2] (x) D -> D (x) a^[2] at a = P.

    Joint kernel of the intertwiner condition and naturality against
    right multiplications (even duals leave map matrices alone), then
    normalized so the component at the unit object is the identity, via
    a left integral.
    """
    p, n = H.p, H.n
    src = diagonal_tensor_module(H, kappa_dual_module(H, regular_hopf_module(H), -2), D)
    tgt = diagonal_tensor_module(H, D, kappa_dual_module(H, regular_hopf_module(H), 2))
    d = src.dim
    rows = []
    for h in range(n):
        rows.append((kron(tgt.mats[h], np.eye(d, dtype=np.int64), p)
                     - kron(np.eye(d, dtype=np.int64), src.mats[h].T % p, p)) % p)
    eye_D = np.eye(D.dim, dtype=np.int64)
    for r in H.algebra.basis_right_mults():
        left = kron(np.asarray(r) % p, eye_D, p)
        right = kron(eye_D, np.asarray(r) % p, p)
        rows.append((kron(right, np.eye(d, dtype=np.int64), p)
                     - kron(np.eye(d, dtype=np.int64), left.T % p, p)) % p)
    K = kernel_basis(np.vstack(rows) % p, p=p)
    if K.shape[1] != 1:
        raise AssertionError(
            f"distinguished twist family has dimension {K.shape[1]}, not 1")
    psi = K[:, 0].reshape(d, d) % p
    lam = distinguished_data(H).left_integral % p
    if D.dim != 1:
        raise NotImplementedError("normalization implemented for invertible "
                                  "one-dimensional D")
    v = mm(psi, lam.reshape(-1, 1), p=p).ravel()
    scale = None
    for idx in range(n):
        if lam[idx] % p:
            scale = (int(v[idx]) * pow(int(lam[idx]), p - 2, p)) % p
            break
    if scale is None or scale == 0:
        raise AssertionError("twist family vanishes on the integral")
    if not np.array_equal(v % p, (scale * lam) % p):
        raise AssertionError("twist family is not the identity at the unit object")
    return (psi * pow(scale, p - 2, p)) % p


def distinguished_shift_check(H: HopfAlgebra, carriers=None,
                              limit: int = 200000) -> ShiftCheckReport:
    """Twists four apart differ by the distinguished invertible module.

    With trivial distinguished data and involutive antipode the twisted
    problems at 0 and 4 coincide equation by equation and the check
    compares full solution sets.  Otherwise a one-dimensional natural
    family psi: a^[-2] (x) D -> D (x) a^[2] is solved for, and every
    balancing at twist 0 on m transports to sigma . (psi (x) 1), which
    must verify as a balancing at twist 4 on D (x) m and lie in the
    independently solved set; counts must agree both ways, D (x) D must
    be trivial, and the twist-8 problem must repeat the twist-4 one.
    """
    p, n = H.p, H.n
    data = distinguished_data(H)
    acts = DiagonalActions(H)
    problems: list[str] = []
    counts: list[tuple[int, int]] = []
    involutive = data.is_trivial() and np.array_equal(
        H.antipode_power(2), np.eye(n, dtype=np.int64))
    if carriers is None:
        carriers = [unit_module(H), data.D]
    if involutive:
        for m in carriers:
            s0 = solve_balancings(acts, m, 0, limit=limit)
            s4 = solve_balancings(acts, m, 4, limit=limit)
            counts.append((len(s0), len(s4)))
            if ({b.sigma.tobytes() for b in s0}
                    != {b.sigma.tobytes() for b in s4}):
                problems.append(f"solution sets at twists 0 and 4 differ on {m.name}")
        return ShiftCheckReport(not problems, "involutive", 0, counts, problems)
    D = data.D
    DD = diagonal_tensor_module(H, D, D)
    if not bool(is_isomorphic(DD, unit_module(H))):
        problems.append("D (x) D is not trivial")
    psi = _twist_family(H, D)
    for m in carriers:
        shifted = diagonal_tensor_module(H, D, m)
        s0 = solve_balancings(acts, m, 0, limit=limit)
        s4 = solve_balancings(acts, shifted, 4, limit=limit)
        counts.append((len(s0), len(s4)))
        if len(s0) != len(s4):
            problems.append(f"counts differ on {m.name}: {len(s0)} vs {len(s4)}")
        bag = {b.sigma.tobytes() for b in s4}
        eye_m = np.eye(m.dim, dtype=np.int64)
        for b in s0:
            sig4 = mm(b.sigma, kron(psi, eye_m, p), p=p)
            moved = Balancing(acts, shifted, sig4, 4)
            rep = verify_balancing(moved)
            if not rep.ok:
                problems.append("transported balancing fails verification: "
                                + "; ".join(rep.problems))
                continue
            if sig4.tobytes() not in bag:
                problems.append("transported balancing missing from the "
                                f"twist-4 set on {m.name}")
        s8 = solve_balancings(acts, shifted, 8, limit=limit)
        if ({b.sigma.tobytes() for b in s8} != bag):
            problems.append(f"twist-8 set differs from twist-4 set on {m.name}")
    P = regular_hopf_module(H)
    if not np.array_equal(kappa_dual_module(H, P, -6).mats,
                          kappa_dual_module(H, P, -2).mats):
        problems.append("fourth antipode power is not the identity on duals")
    return ShiftCheckReport(not problems, "twisted", 1, counts, problems)
