"""Represented functors between module categories and their bimodule calculus.

A left exact functor Mod_A -> Mod_B is Hom_A(X, -) for an (A,B)-bimodule
X, with the target action coming from the right B-action on X; a right
exact one is X (x)_A - for a (B,A)-bimodule.  Both directions of the
dictionary are implemented (phi_* builds functors from bimodules, psi_*
reads the bimodule back off a functor), together with adjoints,
composition, currying of a product variable, and seeded random
generators for all of it.

The psi_* closed forms are independently checkable against the integral
engine: psi_*_flip_check computes the same object as a one-probe
(co)end over the *target* category, where the bound slot is the
identity functor and the presentation is certified.  Yoneda reductions
and the exchange of an integral across an adjunction follow the same
pattern.  Every comparison returns an explicit matrix certificate over
F_p; none of them asserts existence without exhibiting it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import (
    Algebra,
    Bimodule,
    Module,
    ModuleMap,
    TensorOverResult,
    direct_sum,
    hom_dim,
    hom_space,
    is_isomorphic,
    IsoResult,
    opposite_algebra,
    quotient_module,
    regular_module,
    submodule,
    tensor_algebra,
    tensor_over,
)
from .coend import (
    Apply,
    Bar,
    Boxtimes,
    HomFrom,
    HomInto,
    Kernel,
    KernelFunctor,
    Tensor,
    Var,
    coend,
    coend_over_family,
    end,
    end_over_family,
)
from .decompose import is_semisimple, simple_modules
from .hopf import HopfAlgebra, sweedler_indecomposables
from .linalg import (
    cokernel,
    inverse,
    is_invertible,
    kernel_basis,
    kron,
    mm,
    quotient_section,
    rank,
    rref,
    solve,
)


def _same_algebra(A: Algebra, B: Algebra) -> bool:
    return A is B or (
        A.n == B.n
        and A.p == B.p
        and np.array_equal(A.c, B.c)
        and np.array_equal(A.unit, B.unit)
    )


def _require_flavor(F: "RepresentedFunctor", flavor: str) -> None:
    if F.flavor != flavor:
        kind = "left" if flavor == "lex" else "right"
        raise ValueError(f"expected a {kind} exact represented functor, got {F.name}")


# ------------------------------------------------------ bimodule dictionary


def bimodule_dual(Y: Bimodule, name: Optional[str] = None) -> Bimodule:
    """Linear dual with the sides swapped: an (A,B)-bimodule duals to (B,A).

    On dual-basis coordinates both actions are transposes, so the double
    dual is Y again on the nose, not merely up to isomorphism.
    """
    p = Y.p
    left = np.array([m.T % p for m in Y.right_mats])
    right = np.array([m.T % p for m in Y.left_mats])
    return Bimodule(Y.right_algebra, Y.left_algebra, left, right,
                    name=name or f"{Y.name}*", check=False)


def op_box_module(Y: Bimodule, name: Optional[str] = None) -> Module:
    """The (A,B)-bimodule Y as a left module over A^op (x) B.

    Dual-coordinate dictionary: e_i^op (x) f_j acts by L_i^T R_j^T.  This
    is where integrals of the shape  abar [x] F(a)  take their values, so
    it is the realization every flip check compares against.
    """
    A, B = Y.left_algebra, Y.right_algebra
    T = tensor_algebra(opposite_algebra(A), B)
    p = Y.p
    mats = np.zeros((A.n * B.n, Y.dim, Y.dim), dtype=np.int64)
    for i in range(A.n):
        for j in range(B.n):
            mats[i * B.n + j] = mm(Y.left_mats[i].T % p, Y.right_mats[j].T % p, p=p)
    return Module(T, mats, name=name or f"{Y.name}~", check=False)


def is_projective(M: Module, seed: int = 0) -> bool:
    """Whether the free cover of M splits, decided by exact linear algebra."""
    A, p, d = M.algebra, M.p, M.dim
    if d == 0:
        return True
    n = A.n
    lefts = A.basis_left_mults()
    eye_d = np.eye(d, dtype=np.int64)
    free = Module(A, np.array([kron(eye_d, lefts[h], p) for h in range(n)]),
                  name="free", check=False)
    pi = np.zeros((d, d * n), dtype=np.int64)
    for i in range(d):
        for h in range(n):
            pi[:, i * n + h] = M.mats[h][:, i]
    cand = hom_space(M, free, seed=seed)
    if not cand:
        return False
    cols = np.stack([mm(pi, f, p=p).ravel() for f in cand], axis=1)
    return solve(cols, eye_d.ravel().reshape(-1, 1), p=p) is not None


_FAMILY_CACHE: dict[tuple, list[Module]] = {}


def _simples_cached(A: Algebra) -> list[Module]:
    key = (A.c.tobytes(), A.unit.tobytes(), A.p)
    if key not in _FAMILY_CACHE:
        _FAMILY_CACHE[key] = simple_modules(A)
    return _FAMILY_CACHE[key]


def dense_family(H: HopfAlgebra) -> list[Module]:
    """One module from every indecomposable isomorphism class of Mod_H.

    Family-route integrals over this list are exact with no condition on
    the kernel.  Known here for split semisimple algebras (the simples)
    and for the four-dimensional non-semisimple corpus example, which has
    finite representation type.
    """
    if is_semisimple(H.algebra):
        return _simples_cached(H.algebra)
    if H.n == 4:
        key = (H.algebra.c.tobytes(), H.algebra.unit.tobytes(), H.p, "h4")
        if key not in _FAMILY_CACHE:
            _FAMILY_CACHE[key] = sweedler_indecomposables(H)
        return _FAMILY_CACHE[key]
    raise NotImplementedError(
        "dense families are available for split semisimple algebras and "
        "the four-dimensional corpus example")


# -------------------------------------------------------------- the functor


class RepresentedFunctor(KernelFunctor):
    """Functor between module categories carried by a bimodule.

    flavor "lex": X is an (A,B)-bimodule and the functor is
    M |-> Hom_A(X, M), a left B-module through (b.phi)(x) = phi(x.b).
    flavor "rex": X is a (B,A)-bimodule and the functor is
    M |-> X (x)_A M with the left B-action descending to the quotient.

    Exactness beyond the defining side is decided at construction time
    (projectivity of X over the source, or semisimplicity), which is what
    the integral engine's one-probe guard reads.  Object values are
    cached by argument value (modules are never mutated), so the many
    equal-valued re-evaluations inside a family presentation share one
    basis choice.
    """

    variance = "co"

    def __init__(self, flavor: str, X: Bimodule, name: Optional[str] = None,
                 exact: Optional[bool] = None):
        if flavor not in ("lex", "rex"):
            raise ValueError("flavor must be 'lex' or 'rex'")
        self.flavor = flavor
        self.X = X
        if flavor == "lex":
            self.source, self.target = X.left_algebra, X.right_algebra
        else:
            self.source, self.target = X.right_algebra, X.left_algebra
        self.target_algebra = self.target
        self.name = name or (f"Hom({X.name},-)" if flavor == "lex"
                             else f"{X.name}(x)-")
        if exact is None:
            side = X.left_module() if flavor == "lex" else X.right_as_op_module()
            exact = is_semisimple(self.source) or is_projective(side)
        self.is_lex = flavor == "lex" or bool(exact)
        self.is_rex = flavor == "rex" or bool(exact)
        self._cache: dict[bytes, tuple] = {}

    def _check_source(self, M: Module) -> None:
        if not _same_algebra(M.algebra, self.source):
            raise ValueError(
                f"algebra mismatch: {self.name} takes modules over "
                f"{self.source.name}, got one over {M.algebra.name}")

    def _lex_data(self, M: Module) -> tuple:
        key = M.mats.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        p = self.X.p
        basis = hom_space(self.X.left_module(), M)
        h = len(basis)
        if basis:
            flat = np.stack([b.ravel() for b in basis], axis=1)
        else:
            flat = np.zeros((M.dim * self.X.dim, 0), dtype=np.int64)
        B = self.target
        mats = np.zeros((B.n, h, h), dtype=np.int64)
        for j in range(B.n):
            if not h:
                break
            imgs = np.stack(
                [mm(phi, self.X.right_mats[j], p=p).ravel() for phi in basis],
                axis=1)
            x = solve(flat, imgs, p=p)
            if x is None:
                raise AssertionError("right action left the hom space")
            mats[j] = x % p
        obj = Module(B, mats, name=f"{self.name}({M.name})", check=False)
        data = (M, basis, flat, obj)
        self._cache[key] = data
        return data

    def _rex_data(self, M: Module) -> tuple:
        key = M.mats.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        t = tensor_over(self.source, self.X.right_as_op_module(), M,
                        x_extra=list(self.X.left_mats))
        obj = Module(self.target, np.array(t.x_residual),
                     name=f"{self.name}({M.name})", check=False)
        data = (M, t, obj)
        self._cache[key] = data
        return data

    def hom_data(self, M: Module) -> tuple[list[np.ndarray], np.ndarray]:
        """Hom_A(X, M) basis and its column-stacked flat form (lex only)."""
        if self.flavor != "lex":
            raise ValueError("hom_data is a lex-side accessor")
        _, basis, flat, _ = self._lex_data(M)
        return basis, flat

    def tensor_data(self, M: Module) -> TensorOverResult:
        """Presentation of X (x)_A M (rex only)."""
        if self.flavor != "rex":
            raise ValueError("tensor_data is a rex-side accessor")
        return self._rex_data(M)[1]

    def on_object(self, M: Module) -> Module:
        self._check_source(M)
        if self.flavor == "lex":
            return self._lex_data(M)[3]
        return self._rex_data(M)[2]

    def on_map(self, f: np.ndarray, src: Module, tgt: Module) -> np.ndarray:
        p = self.X.p
        f = np.asarray(f, dtype=np.int64) % p
        if self.flavor == "rex":
            ts = self._rex_data(src)[1]
            tt = self._rex_data(tgt)[1]
            big = kron(np.eye(self.X.dim, dtype=np.int64), f, p)
            return mm(tt.projection, big, ts.section, p=p)
        _, bs, _, _ = self._lex_data(src)
        _, bt, flat_t, _ = self._lex_data(tgt)
        out = np.zeros((len(bt), len(bs)), dtype=np.int64)
        if not bs:
            return out
        if not bt:
            if any(np.any(mm(f, phi, p=p)) for phi in bs):
                raise AssertionError("hom image missed by empty target basis")
            return out
        imgs = np.stack([mm(f, phi, p=p).ravel() for phi in bs], axis=1)
        x = solve(flat_t, imgs, p=p)
        if x is None:
            raise AssertionError("hom image left the computed hom space")
        return x % p

    def __repr__(self):
        return (f"RepresentedFunctor({self.name}: {self.source.name} -> "
                f"{self.target.name}, {self.flavor})")


def apply(F: RepresentedFunctor, M: Module) -> Module:
    return F.on_object(M)


def apply_on_map(F: RepresentedFunctor, f: ModuleMap) -> ModuleMap:
    mat = F.on_map(f.f, f.source, f.target)
    return ModuleMap(F.on_object(f.source), F.on_object(f.target), mat)


def identity_functor(A: Algebra, flavor: str = "rex") -> RepresentedFunctor:
    from .algebra import regular_bimodule

    return RepresentedFunctor(flavor, regular_bimodule(A),
                              name=f"Id_{A.name}", exact=True)


# ------------------------------------------------- Eilenberg-Watts dictionary


def phi_lex(Y: Bimodule, name: Optional[str] = None) -> RepresentedFunctor:
    """The left exact functor Hom_A(Y, -) of an (A,B)-bimodule."""
    return RepresentedFunctor("lex", Y, name=name)


def phi_rex(Y: Bimodule, name: Optional[str] = None) -> RepresentedFunctor:
    """The right exact functor Y* (x)_A - of an (A,B)-bimodule.

    Passing through the dual keeps phi_lex and phi_rex consumers of the
    same input shape, and makes the adjoint square close on the nose: the
    left adjoint of phi_lex(Y) is carried by Y itself, which is (Y*)*.
    """
    return RepresentedFunctor("rex", bimodule_dual(Y), name=name)


def psi_lex(F: RepresentedFunctor) -> Bimodule:
    """Representing (A,B)-bimodule of a left exact functor.

    Evaluate the left adjoint at the regular target module; the residual
    right multiplications supply the B-side.
    """
    _require_flavor(F, "lex")
    B = F.target
    t = tensor_over(B, F.X.right_as_op_module(), regular_module(B),
                    x_extra=list(F.X.left_mats),
                    y_extra=list(B.basis_right_mults()))
    return Bimodule(F.source, B, t.x_residual, t.y_residual,
                    name=f"psi^l({F.name})")


def psi_rex(G: RepresentedFunctor) -> Bimodule:
    """Recover the (A,B)-bimodule whose phi_rex is the given functor.

    The functor value at the regular source module is a (B,A)-bimodule;
    its linear dual is the answer, matching the phi_rex convention.
    """
    _require_flavor(G, "rex")
    A = G.source
    t = tensor_over(A, G.X.right_as_op_module(), regular_module(A),
                    x_extra=list(G.X.left_mats),
                    y_extra=list(A.basis_right_mults()))
    W = Bimodule(G.target, A, t.x_residual, t.y_residual,
                 name=f"{G.name}(reg)")
    return bimodule_dual(W, name=f"psi^r({G.name})")


def adjoint_of(F: RepresentedFunctor) -> RepresentedFunctor:
    """The other half of the adjunction, carried by the same bimodule.

    Hom_A(X,-) has left adjoint X (x)_B -; X (x)_A - has right adjoint
    Hom_B(X,-).  Direction and flavor swap, the bimodule does not move.
    """
    if F.flavor == "lex":
        return RepresentedFunctor("rex", F.X, name=f"{F.name}^la")
    return RepresentedFunctor("lex", F.X, name=f"{F.name}^ra")


@dataclass
class NaturalIso:
    """Comparison of two represented functors of the same flavor.

    Invertibility of an intertwiner between the representing bimodules is
    exactly natural isomorphism of the functors, so the bimodule iso is
    the certificate.
    """

    first: RepresentedFunctor
    second: RepresentedFunctor
    bimodule_iso: IsoResult

    @property
    def status(self) -> str:
        return self.bimodule_iso.status

    def __bool__(self) -> bool:
        return bool(self.bimodule_iso)


def natural_iso(F: RepresentedFunctor, G: RepresentedFunctor,
                seed: int = 0) -> NaturalIso:
    if F.flavor != G.flavor:
        raise ValueError("cannot compare functors of different exactness flavor")
    if not (_same_algebra(F.source, G.source)
            and _same_algebra(F.target, G.target)):
        raise ValueError("algebra mismatch: the functors act between "
                         "different module categories")
    iso = is_isomorphic(F.X.as_module(), G.X.as_module(), seed=seed)
    return NaturalIso(F, G, iso)


def compose(F: RepresentedFunctor, G: RepresentedFunctor,
            name: Optional[str] = None) -> RepresentedFunctor:
    """F after G, carried by the tensor product of the representing bimodules.

    Hom_B(X, Hom_A(Y, -)) is Hom_A(Y (x)_B X, -) and
    X (x)_B (Y (x)_A -) is (X (x)_B Y) (x)_A -, so composition stays
    inside the represented class with an explicitly computed bimodule.
    """
    if F.flavor != G.flavor:
        raise ValueError("cannot compose functors of different exactness flavor")
    if not _same_algebra(G.target, F.source):
        raise ValueError("algebra mismatch: inner target differs from outer source")
    nm = name or f"{F.name}o{G.name}"
    if F.flavor == "lex":
        t = tensor_over(F.source, G.X.right_as_op_module(), F.X.left_module(),
                        x_extra=list(G.X.left_mats),
                        y_extra=list(F.X.right_mats))
        Z = Bimodule(G.source, F.target, t.x_residual, t.y_residual,
                     name=f"{G.X.name}(x){F.X.name}")
        return RepresentedFunctor("lex", Z, name=nm)
    t = tensor_over(F.source, F.X.right_as_op_module(), G.X.left_module(),
                    x_extra=list(F.X.left_mats),
                    y_extra=list(G.X.right_mats))
    Z = Bimodule(F.target, G.source, t.x_residual, t.y_residual,
                 name=f"{F.X.name}(x){G.X.name}")
    return RepresentedFunctor("rex", Z, name=nm)


def parameter_curry(F: RepresentedFunctor, P: Algebra,
                    A: Algebra) -> RepresentedFunctor:
    """Split a product variable off a left exact functor.

    A lex functor on Mod_{P(x)A} with target Mod_B becomes a lex functor
    Mod_P -> Mod_{A^op(x)B}: the A-part of the left action migrates to
    the right side in op form.  The carrier space does not change.
    """
    _require_flavor(F, "lex")
    if not _same_algebra(F.source, tensor_algebra(P, A)):
        raise ValueError("algebra mismatch: functor source is not the "
                         "stated product")
    X, B = F.X, F.target
    p, d = X.p, X.dim
    nP, nA, nB = P.n, A.n, B.n
    leftP = np.zeros((nP, d, d), dtype=np.int64)
    leftA = np.zeros((nA, d, d), dtype=np.int64)
    for i in range(nP):
        acc = np.zeros((d, d), dtype=np.int64)
        for j in range(nA):
            acc = (acc + int(A.unit[j]) * X.left_mats[i * nA + j]) % p
        leftP[i] = acc
    for j in range(nA):
        acc = np.zeros((d, d), dtype=np.int64)
        for i in range(nP):
            acc = (acc + int(P.unit[i]) * X.left_mats[i * nA + j]) % p
        leftA[j] = acc
    R = tensor_algebra(opposite_algebra(A), B)
    right = np.zeros((nA * nB, d, d), dtype=np.int64)
    for j in range(nA):
        for k in range(nB):
            right[j * nB + k] = mm(leftA[j], X.right_mats[k], p=p)
    Xc = Bimodule(P, R, leftP, right, name=f"curry({X.name})")
    return RepresentedFunctor("lex", Xc, name=f"curry({F.name})")


def parameter_uncurry(G: RepresentedFunctor, P: Algebra, A: Algebra,
                      B: Algebra) -> RepresentedFunctor:
    """Inverse of parameter_curry; the round trip is the identity on arrays."""
    _require_flavor(G, "lex")
    if not _same_algebra(G.source, P):
        raise ValueError("algebra mismatch: functor source is not the "
                         "stated parameter algebra")
    if not _same_algebra(G.target, tensor_algebra(opposite_algebra(A), B)):
        raise ValueError("algebra mismatch: functor target is not the "
                         "stated op-product")
    X = G.X
    p, d = X.p, X.dim
    nP, nA, nB = P.n, A.n, B.n
    rightAop = np.zeros((nA, d, d), dtype=np.int64)
    rightB = np.zeros((nB, d, d), dtype=np.int64)
    for j in range(nA):
        acc = np.zeros((d, d), dtype=np.int64)
        for k in range(nB):
            acc = (acc + int(B.unit[k]) * X.right_mats[j * nB + k]) % p
        rightAop[j] = acc
    for k in range(nB):
        acc = np.zeros((d, d), dtype=np.int64)
        for j in range(nA):
            acc = (acc + int(A.unit[j]) * X.right_mats[j * nB + k]) % p
        rightB[k] = acc
    left = np.zeros((nP * nA, d, d), dtype=np.int64)
    for i in range(nP):
        for j in range(nA):
            left[i * nA + j] = mm(X.left_mats[i], rightAop[j], p=p)
    Xu = Bimodule(tensor_algebra(P, A), B, left, rightB,
                  name=f"uncurry({X.name})")
    return RepresentedFunctor("lex", Xu, name=f"uncurry({G.name})")


# ----------------------------------------------------------- engine checks


@dataclass
class CheckResult:
    ok: bool
    dim: int
    certificate: Optional[np.ndarray] = None
    status: str = ""   # "undecided" when a randomized iso search gave up

    def __bool__(self) -> bool:
        return self.ok


def yoneda_coend_check(H: HopfAlgebra, F: RepresentedFunctor, M: Module,
                       seed: int = 0,
                       family: Optional[Sequence[Module]] = None) -> CheckResult:
    """integral^a Hom(a,M) (x) F(a) against F(M), via evaluation.

    Default is the certified one-probe route (F must be right exact for
    the coend guard); pass a dense family to cover the rest.
    """
    if not _same_algebra(H.algebra, F.source):
        raise ValueError("algebra mismatch: kernel variable and functor source")
    p = H.p
    hom = HomInto(M)
    kern = Kernel(H, Tensor([Apply(hom, Var()), Apply(F, Var())]))
    FM = F.on_object(M)
    if family is None:
        res = coend(kern)
        members: list[Module] = [res.probe[0]]
        projection, section = res.presentation.projection, res.presentation.section
        obj = res.object
    else:
        fam = coend_over_family(kern, list(family), seed=seed)
        members = list(family)
        projection, section = fam.projection, fam.section
        obj = fam.object
    blocks = []
    for u in members:
        basis = hom.basis(u)
        Fu = F.on_object(u)
        blk = np.zeros((FM.dim, len(basis) * Fu.dim), dtype=np.int64)
        for i, phi in enumerate(basis):
            blk[:, i * Fu.dim:(i + 1) * Fu.dim] = F.on_map(phi, u, M)
        blocks.append(blk)
    ev = np.hstack(blocks)
    cert = mm(ev, section, p=p)
    ok = not np.any((mm(cert, projection, p=p) - ev) % p)
    ok = ok and obj.dim == FM.dim and is_invertible(cert, p)
    ok = ok and ModuleMap(obj, FM, cert).is_intertwiner()
    return CheckResult(bool(ok), obj.dim, cert)


def yoneda_end_check(H: HopfAlgebra, F: RepresentedFunctor, M: Module,
                     seed: int = 0,
                     family: Optional[Sequence[Module]] = None) -> CheckResult:
    """F(M) against integral_a Hom(M,a)bar (x) F(a), via coevaluation.

    The comparison sends v to sum_i psi_i* (x) F(psi_i)v over a basis
    psi_i of Hom(M,a); landing inside the end is part of what is checked.
    One-probe route needs F left exact.
    """
    if not _same_algebra(H.algebra, F.source):
        raise ValueError("algebra mismatch: kernel variable and functor source")
    p = H.p
    hom = HomFrom(M)
    kern = Kernel(H, Tensor([Bar(Apply(hom, Var())), Apply(F, Var())]))
    FM = F.on_object(M)
    if family is None:
        res = end(kern)
        members: list[Module] = [res.probe[0]]
        inclusion = res.presentation.inclusion
        obj = res.object
    else:
        fam = end_over_family(kern, list(family), seed=seed)
        members = list(family)
        inclusion = fam.inclusion
        obj = fam.object
    rows = []
    for u in members:
        basis = hom.basis(u)
        Fu = F.on_object(u)
        blk = np.zeros((len(basis) * Fu.dim, FM.dim), dtype=np.int64)
        for i, psi in enumerate(basis):
            blk[i * Fu.dim:(i + 1) * Fu.dim, :] = F.on_map(psi, M, u)
        rows.append(blk)
    comp = np.vstack(rows)
    cert = solve(inclusion, comp, p=p)
    if cert is None:
        return CheckResult(False, obj.dim, None)
    cert = cert % p
    ok = obj.dim == FM.dim and is_invertible(cert, p)
    ok = ok and ModuleMap(FM, obj, cert).is_intertwiner()
    return CheckResult(bool(ok), obj.dim, cert)


def psi_lex_flip_check(F: RepresentedFunctor, H: HopfAlgebra,
                       seed: int = 0) -> CheckResult:
    """Engine route to the representing bimodule of a lex functor.

    integral^b (F^la b)bar [x] b over the target category has an identity
    covariant slot, so the one-probe coend is certified; the result must
    match op_box_module(psi_lex(F)).
    """
    _require_flavor(F, "lex")
    if not _same_algebra(H.algebra, F.target):
        raise ValueError("algebra mismatch: the flip integral runs over "
                         "the functor's target")
    G = adjoint_of(F)
    res = coend(Kernel(H, Boxtimes(Bar(Apply(G, Var())), Var())))
    expected = op_box_module(psi_lex(F))
    iso = is_isomorphic(res.object, expected, seed=seed)
    return CheckResult(bool(iso), res.object.dim, iso.f, status=iso.status)


def psi_rex_flip_check(G: RepresentedFunctor, H: HopfAlgebra,
                       seed: int = 0) -> CheckResult:
    """End-side mirror of psi_lex_flip_check for a rex functor."""
    _require_flavor(G, "rex")
    if not _same_algebra(H.algebra, G.target):
        raise ValueError("algebra mismatch: the flip integral runs over "
                         "the functor's target")
    L = adjoint_of(G)
    res = end(Kernel(H, Boxtimes(Bar(Apply(L, Var())), Var())))
    expected = op_box_module(psi_rex(G))
    iso = is_isomorphic(res.object, expected, seed=seed)
    return CheckResult(bool(iso), res.object.dim, iso.f, status=iso.status)


def unit_map(F: RepresentedFunctor, u: Module) -> np.ndarray:
    """Unit u -> F(F^la u) of the adjunction at u, for lex F.

    v goes to the A-linear map x |-> [x (x) v]; its coordinates in the
    cached hom basis are solved for, and B-linearity is asserted.
    """
    _require_flavor(F, "lex")
    p = F.X.p
    G = adjoint_of(F)
    t = G.tensor_data(u)
    a0 = G.on_object(u)
    _, flat = F.hom_data(a0)
    q3 = t.projection.reshape(a0.dim, F.X.dim, u.dim)
    eta = np.zeros((flat.shape[1], u.dim), dtype=np.int64)
    for v in range(u.dim):
        x = solve(flat, q3[:, :, v].reshape(-1, 1), p=p)
        if x is None:
            raise AssertionError("unit component is not a module map")
        eta[:, v] = x.ravel()
    if not ModuleMap(u, F.on_object(a0), eta).is_intertwiner():
        raise AssertionError("adjunction unit failed naturality in the target")
    return eta % p


def counit_map(G: RepresentedFunctor, u: Module) -> np.ndarray:
    """Counit G(G^ra u) -> u of the adjunction at u, for rex G.

    x (x) psi evaluates to psi(x); descent through the tensor relations
    is asserted rather than assumed.
    """
    _require_flavor(G, "rex")
    p = G.X.p
    L = adjoint_of(G)
    h = L.on_object(u)
    basis, _ = L.hom_data(u)
    t = G.tensor_data(h)
    o1 = G.on_object(h)
    raw = np.zeros((u.dim, G.X.dim * h.dim), dtype=np.int64)
    for w in range(G.X.dim):
        for k in range(h.dim):
            raw[:, w * h.dim + k] = basis[k][:, w]
    eps = mm(raw, t.section, p=p)
    if np.any((mm(eps, t.projection, p=p) - raw) % p):
        raise AssertionError("counit does not descend through the tensor relations")
    if not ModuleMap(o1, u, eps).is_intertwiner():
        raise AssertionError("adjunction counit failed naturality in the target")
    return eps


def coend_flip_check(F1: RepresentedFunctor, F2: RepresentedFunctor,
                     H_src: HopfAlgebra, H_tgt: HopfAlgebra,
                     seed: int = 0) -> CheckResult:
    """Exchange a coend across the adjunction of a lex functor.

    integral^b (F1^la b)bar [x] F2(b)  against  integral^a abar [x] F2(F1 a),
    both over dense families; the comparison map inserts the adjunction
    unit and must descend, intertwine, and invert.
    """
    _require_flavor(F1, "lex")
    _require_flavor(F2, "lex")
    if not _same_algebra(F2.source, F1.target):
        raise ValueError("algebra mismatch: F2 must consume F1's target")
    if not _same_algebra(H_src.algebra, F1.source):
        raise ValueError("algebra mismatch: source variable")
    if not _same_algebra(H_tgt.algebra, F1.target):
        raise ValueError("algebra mismatch: target variable")
    p = H_src.p
    G = adjoint_of(F1)
    fam_b = dense_family(H_tgt)
    lhs = coend_over_family(
        Kernel(H_tgt, Boxtimes(Bar(Apply(G, Var())), Apply(F2, Var()))),
        fam_b, seed=seed)
    a0s = [G.on_object(u) for u in fam_b]
    base = dense_family(H_src)
    rhs = coend_over_family(
        Kernel(H_src, Boxtimes(Bar(Var()), Apply(F2, Apply(F1, Var())))),
        list(base) + a0s, seed=seed)
    blocks = []
    for i, u in enumerate(fam_b):
        a0 = a0s[i]
        eta = unit_map(F1, u)
        o1 = F1.on_object(a0)
        f2eta = F2.on_map(eta, u, o1)
        comp = rhs.components[len(base) + i]
        blocks.append(mm(comp, kron(np.eye(a0.dim, dtype=np.int64), f2eta, p),
                         p=p))
    phi = np.hstack(blocks)
    cert = mm(phi, lhs.section, p=p)
    ok = not np.any((mm(cert, lhs.projection, p=p) - phi) % p)
    ok = ok and lhs.dim == rhs.dim and is_invertible(cert, p)
    ok = ok and ModuleMap(lhs.object, rhs.object, cert).is_intertwiner()
    return CheckResult(bool(ok), rhs.dim, cert)


def end_flip_check(G1: RepresentedFunctor, G2: RepresentedFunctor,
                   H_src: HopfAlgebra, H_tgt: HopfAlgebra,
                   seed: int = 0) -> CheckResult:
    """End-side mirror of coend_flip_check, for right exact functors.

    integral_b (G1^ra b)bar [x] G2(b)  against  integral_a abar [x] G2(G1 a);
    the comparison projects through the counit and must land inside the
    equalizer, which the solve step verifies.
    """
    _require_flavor(G1, "rex")
    _require_flavor(G2, "rex")
    if not _same_algebra(G2.source, G1.target):
        raise ValueError("algebra mismatch: G2 must consume G1's target")
    if not _same_algebra(H_src.algebra, G1.source):
        raise ValueError("algebra mismatch: source variable")
    if not _same_algebra(H_tgt.algebra, G1.target):
        raise ValueError("algebra mismatch: target variable")
    p = H_src.p
    L = adjoint_of(G1)
    fam_b = dense_family(H_tgt)
    lhs = end_over_family(
        Kernel(H_tgt, Boxtimes(Bar(Apply(L, Var())), Apply(G2, Var()))),
        fam_b, seed=seed)
    a0s = [L.on_object(u) for u in fam_b]
    base = dense_family(H_src)
    rhs = end_over_family(
        Kernel(H_src, Boxtimes(Bar(Var()), Apply(G2, Apply(G1, Var())))),
        list(base) + a0s, seed=seed)
    rows = []
    for i, u in enumerate(fam_b):
        a0 = a0s[i]
        eps = counit_map(G1, u)
        o1 = G1.on_object(a0)
        g2eps = G2.on_map(eps, o1, u)
        comp = rhs.components[len(base) + i]
        rows.append(mm(kron(np.eye(a0.dim, dtype=np.int64), g2eps, p), comp,
                       p=p))
    stacked = np.vstack(rows)
    cert = solve(lhs.inclusion, stacked, p=p)
    if cert is None:
        return CheckResult(False, rhs.dim, None)
    cert = cert % p
    ok = lhs.dim == rhs.dim and is_invertible(cert, p)
    ok = ok and ModuleMap(rhs.object, lhs.object, cert).is_intertwiner()
    return CheckResult(bool(ok), rhs.dim, cert)


def hom_commutation_check(H: HopfAlgebra, F: RepresentedFunctor, T: Module,
                          seed: int = 0) -> CheckResult:
    """Hom(T, integral^a abar [x] F(a)) against integral^a Hom(T, abar [x] F(a)).

    Both sides run over the dense family; the comparison postcomposes a
    hom element with the coend's structure map at its member.
    """
    p = H.p
    fam = dense_family(H)
    inner = Boxtimes(Bar(Var()), Apply(F, Var()))
    ikern = Kernel(H, inner)
    cfam = coend_over_family(ikern, fam, seed=seed)
    C = cfam.object
    if not _same_algebra(T.algebra, C.algebra):
        raise ValueError("algebra mismatch: the test object lives where "
                         "the coend does")
    lhs_basis = hom_space(T, C, seed=seed)
    homT = HomFrom(T)
    hfam = coend_over_family(Kernel(H, Apply(homT, inner)), fam, seed=seed)
    if not lhs_basis:
        return CheckResult(hfam.dim == 0, hfam.dim, None)
    flat = np.stack([b.ravel() for b in lhs_basis], axis=1)
    blocks = []
    for i, u in enumerate(fam):
        xu = ikern.at(u, u)
        bas = homT.basis(xu)
        blk = np.zeros((len(lhs_basis), len(bas)), dtype=np.int64)
        for k, psi in enumerate(bas):
            img = mm(cfam.components[i], psi, p=p).ravel()
            x = solve(flat, img.reshape(-1, 1), p=p)
            if x is None:
                raise AssertionError("postcomposition left the hom space")
            blk[:, k] = x.ravel()
        blocks.append(blk)
    phi = np.hstack(blocks)
    cert = mm(phi, hfam.section, p=p)
    ok = not np.any((mm(cert, hfam.projection, p=p) - phi) % p)
    ok = ok and hfam.dim == len(lhs_basis) and is_invertible(cert, p)
    return CheckResult(bool(ok), hfam.dim, cert)


def triangle_check(F: RepresentedFunctor, seed: int = 0) -> CheckResult:
    """Round the lex-rex triangle starting from a left exact functor.

    psi_rex(phi_rex(psi_lex(F))) must reproduce psi_lex(F), and the left
    adjoint of phi_lex must coincide with phi_rex of the dual bimodule on
    the nose.
    """
    _require_flavor(F, "lex")
    Y = psi_lex(F)
    R = phi_rex(Y)
    Y2 = psi_rex(R)
    iso = is_isomorphic(Y2.as_module(), Y.as_module(), seed=seed)
    ok = bool(iso) and R.is_rex
    G1 = adjoint_of(phi_lex(Y))
    G2 = phi_rex(bimodule_dual(Y))
    ok = ok and G1.flavor == "rex" and G2.flavor == "rex"
    ok = ok and np.array_equal(G1.X.left_mats, G2.X.left_mats)
    ok = ok and np.array_equal(G1.X.right_mats, G2.X.right_mats)
    return CheckResult(bool(ok), Y.dim, iso.f if iso else None, status=iso.status)


def adjunction_dim_check(F: RepresentedFunctor, N: Module, M: Module) -> bool:
    """Hom(F^la N, M) and Hom(N, F M) have equal dimension, for lex F."""
    _require_flavor(F, "lex")
    G = adjoint_of(F)
    return hom_dim(G.on_object(N), M) == hom_dim(N, F.on_object(M))


def preserves_kernels_check(F: RepresentedFunctor, f: ModuleMap) -> bool:
    """ker F(f) coincides with the image of F applied to ker f."""
    _require_flavor(F, "lex")
    p = f.source.p
    K = kernel_basis(f.f, p)
    Ff = F.on_map(f.f, f.source, f.target)
    ker_after = kernel_basis(Ff, p)
    if K.shape[1] == 0:
        return ker_after.shape[1] == 0
    ker = submodule(f.source, K, name="ker")
    Finc = F.on_map(K, ker, f.source)
    r1, r2 = rank(ker_after, p), rank(Finc, p)
    return r1 == r2 == rank(np.hstack([ker_after, Finc]), p)


def preserves_cokernels_check(G: RepresentedFunctor, inc: ModuleMap) -> bool:
    """coker G(inc) matches G of the cokernel, compared through G(projection)."""
    _require_flavor(G, "rex")
    p = inc.source.p
    C, q, _ = quotient_module(inc.target, inc.f, name="coker")
    Gq = G.on_map(q, inc.target, C)
    Ginc = G.on_map(inc.f, inc.source, inc.target)
    if rank(Gq, p) != G.on_object(C).dim:
        return False
    ker_gq = kernel_basis(Gq, p)
    r1, r2 = rank(ker_gq, p), rank(Ginc, p)
    if r1 == 0:
        return r2 == 0
    return r1 == r2 == rank(np.hstack([ker_gq, Ginc]), p)


# ------------------------------------------------------- seeded generators


def invariant_closure(mats: np.ndarray, gens: np.ndarray, p: int) -> np.ndarray:
    """Basis of the smallest action-invariant span containing the columns."""
    S = np.asarray(gens, dtype=np.int64) % p
    if S.ndim == 1:
        S = S[:, None]
    if S.shape[1]:
        S = S[:, rref(S, p)[1]]
    while S.shape[1]:
        grown = np.hstack([S] + [mm(m, S, p=p) for m in mats])
        basis = grown[:, rref(grown, p)[1]]
        if basis.shape[1] == S.shape[1]:
            break
        S = basis
    return S


def _random_invertible(rng: np.random.Generator, d: int,
                       p: int) -> tuple[np.ndarray, np.ndarray]:
    while True:
        g = rng.integers(0, p, size=(d, d)).astype(np.int64)
        gi = inverse(g % p, p)
        if gi is not None:
            return g % p, gi


def random_module(A: Algebra, max_dim: int = 4, seed: int = 0) -> Module:
    """Seeded random module of dimension 1..max_dim.

    Semisimple algebras get a random sum of simples in a scrambled basis;
    otherwise a random quotient of a rank-two free module, redrawn until
    the dimension lands in range.
    """
    p = A.p
    rng = np.random.default_rng(seed)
    if is_semisimple(A):
        sims = _simples_cached(A)
        picks: list[Module] = []
        total = 0
        while True:
            room = [S for S in sims if total + S.dim <= max_dim]
            if not room:
                break
            if picks and rng.random() < 0.4:
                break
            picks.append(room[int(rng.integers(len(room)))])
            total += picks[-1].dim
        if not picks:
            raise ValueError(f"no simple module fits inside dimension {max_dim}")
        M = picks[0]
        for S in picks[1:]:
            M = direct_sum(M, S)
        g, gi = _random_invertible(rng, M.dim, p)
        mats = np.array([mm(g, m, gi, p=p) for m in M.mats])
        return Module(A, mats, name=f"rnd({A.name};{seed})", check=False)
    lefts = A.basis_left_mults()
    eye2 = np.eye(2, dtype=np.int64)
    free = np.array([kron(eye2, m, p) for m in lefts])
    d = 2 * A.n
    for _ in range(500):
        ngen = int(rng.integers(1, 4))
        S = invariant_closure(free, rng.integers(0, p, size=(d, ngen)), p)
        dim = d - S.shape[1]
        if not 1 <= dim <= max_dim:
            continue
        q, _ = cokernel(S, p)
        s = quotient_section(q, p)
        mats = np.zeros((A.n, dim, dim), dtype=np.int64)
        for i in range(A.n):
            mats[i] = mm(q, free[i], s, p=p)
            if np.any(mm(mats[i], q, p=p) != mm(q, free[i], p=p)):
                raise AssertionError("closure was not invariant")
        return Module(A, mats, name=f"rnd({A.name};{seed})", check=False)
    raise RuntimeError("no random module of the requested size after 500 draws")


def random_bimodule(A: Algebra, B: Algebra, max_dim: int = 4,
                    seed: int = 0) -> Bimodule:
    """Seeded random (A,B)-bimodule, drawn over the product algebra."""
    T = tensor_algebra(A, opposite_algebra(B))
    M = random_module(T, max_dim=max_dim, seed=seed)
    nA, nB = A.n, B.n
    d, p = M.dim, A.p
    left = np.zeros((nA, d, d), dtype=np.int64)
    right = np.zeros((nB, d, d), dtype=np.int64)
    for i in range(nA):
        acc = np.zeros((d, d), dtype=np.int64)
        for j in range(nB):
            acc = (acc + int(B.unit[j]) * M.mats[i * nB + j]) % p
        left[i] = acc
    for j in range(nB):
        acc = np.zeros((d, d), dtype=np.int64)
        for i in range(nA):
            acc = (acc + int(A.unit[i]) * M.mats[i * nB + j]) % p
        right[j] = acc
    return Bimodule(A, B, left, right, name=f"rnd({A.name}|{B.name};{seed})")


def random_represented_functor(A: Algebra, B: Algebra, max_dim: int = 4,
                               seed: int = 0,
                               flavor: Optional[str] = None) -> RepresentedFunctor:
    """Seeded random functor Mod_A -> Mod_B of either flavor."""
    rng = np.random.default_rng(seed)
    if flavor is None:
        flavor = "lex" if int(rng.integers(2)) else "rex"
    if flavor == "lex":
        X = random_bimodule(A, B, max_dim=max_dim, seed=seed)
    else:
        X = random_bimodule(B, A, max_dim=max_dim, seed=seed)
    return RepresentedFunctor(flavor, X, name=f"rnd^{flavor}({seed})")
