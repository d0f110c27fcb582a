"""Finite-dimensional Hopf algebras: the engine's finite tensor categories.

A HopfAlgebra packages an Algebra with comultiplication, counit and
antipode matrices.  Its module category gets a strict monoidal structure:
tensor products act through iterated Delta on Kronecker factors, duals
twist transposes by antipode powers, and all coherence data (associators,
double-dual identifications) is the identity on carriers, so the
downstream calculus can check equalities of matrices instead of pasting
coherence diagrams.

Dual conventions (fixed once, everything downstream depends on them):
  right dual M^[1]:  action h -> rho(S h)^T,    ev: M^[1] (x) M -> 1,
                                                coev: 1 -> M (x) M^[1];
  left dual M^[-1]:  action h -> rho(S^-1 h)^T, ev: M (x) M^[-1] -> 1,
                                                coev: 1 -> M^[-1] (x) M.
Iterating gives M^[k] with action rho(S^k h), transposed for odd k; even
k keeps the carrier and the maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import Algebra, Module, kernel_basis, submodule, tensor_algebra
from .linalg import inverse, kron, mm


class HopfAlgebra:
    def __init__(self, algebra: Algebra, delta, eps, antipode,
                 name: Optional[str] = None, check: bool = True):
        self.algebra = algebra
        n, p = algebra.n, algebra.p
        self.delta = np.asarray(delta, dtype=np.int64) % p    # (n*n, n)
        self.eps = np.asarray(eps, dtype=np.int64) % p        # (n,)
        self.S = np.asarray(antipode, dtype=np.int64) % p     # (n, n)
        self.name = name or algebra.name
        if self.delta.shape != (n * n, n):
            raise ValueError(f"comultiplication must be {n * n}x{n}")
        if self.eps.shape != (n,):
            raise ValueError("counit must be a length-n vector")
        if self.S.shape != (n, n):
            raise ValueError("antipode must be n x n")
        S_inv = inverse(self.S, p)
        if S_inv is None:
            raise ValueError("antipode is not invertible")
        self.S_inv = S_inv
        if check:
            bad = validate_hopf(self)
            if bad:
                raise ValueError(f"invalid Hopf algebra {self.name}: {bad[0]}")

    @property
    def n(self) -> int:
        return self.algebra.n

    @property
    def p(self) -> int:
        return self.algebra.p

    def mult_matrix(self) -> np.ndarray:
        """m: H (x) H -> H as an (n, n^2) matrix, column index (i,j) i-slow."""
        n = self.n
        return self.algebra.c.transpose(2, 0, 1).reshape(self.n, n * n) % self.p

    def antipode_power(self, kappa: int) -> np.ndarray:
        out = np.eye(self.n, dtype=np.int64)
        step = self.S if kappa >= 0 else self.S_inv
        for _ in range(abs(kappa)):
            out = mm(step, out, p=self.p)
        return out

    def __repr__(self):
        return f"HopfAlgebra({self.name}, dim {self.n}, p={self.p})"


def antipode_power(H: HopfAlgebra, kappa: int) -> np.ndarray:
    return H.antipode_power(kappa)


def validate_hopf(H: HopfAlgebra, max_reports: int = 8) -> list[str]:
    """Every violated Hopf axiom instance, by name; empty iff valid."""
    out = []
    n, p = H.n, H.p
    eye = np.eye(n, dtype=np.int64)
    D, eps, S = H.delta, H.eps, H.S
    m = H.mult_matrix()
    # coassociativity
    lhs = mm(kron(D, eye, p), D, p=p)
    rhs = mm(kron(eye, D, p), D, p=p)
    if np.any(lhs != rhs):
        cols = np.argwhere(np.any((lhs - rhs) % p != 0, axis=0)).ravel()
        out.append(f"coassociativity fails at basis indices {cols.tolist()[:max_reports]}")
    # counit laws
    eps_row = eps.reshape(1, n)
    if np.any(mm(kron(eps_row, eye, p), D, p=p) != eye):
        out.append("left counit law fails")
    if np.any(mm(kron(eye, eps_row, p), D, p=p) != eye):
        out.append("right counit law fails")
    # Delta and eps are algebra maps; Delta(1) = 1 (x) 1, eps(1) = 1
    HH = tensor_algebra(H.algebra, H.algebra)
    for i in range(n):
        for j in range(n):
            prod = H.algebra.c[i, j] % p
            lhs_v = mm(D, prod.reshape(n, 1), p=p).ravel()
            rhs_v = HH.multiply(D[:, i], D[:, j])
            if np.any(lhs_v != rhs_v):
                out.append(f"comultiplication is not multiplicative at ({i},{j})")
            le = int(np.dot(eps, prod) % p)
            re = int(eps[i]) * int(eps[j]) % p
            if le != re:
                out.append(f"counit is not multiplicative at ({i},{j})")
            if len(out) >= max_reports:
                return out
    u = H.algebra.unit
    if np.any(mm(D, u.reshape(n, 1), p=p).ravel() != np.kron(u, u) % p):
        out.append("comultiplication does not preserve the unit")
    if int(np.dot(eps, u) % p) != 1:
        out.append("counit does not preserve the unit")
    # antipode axioms: m (S (x) id) Delta = u eps = m (id (x) S) Delta
    target = mm(u.reshape(n, 1), eps.reshape(1, n), p=p)
    if np.any(mm(m, kron(S, eye, p), D, p=p) != target):
        out.append("antipode axiom (S*id) fails")
    if np.any(mm(m, kron(eye, S, p), D, p=p) != target):
        out.append("antipode axiom (id*S) fails")
    return out


# ---------------------------------------------------------------- H-modules


def unit_module(H: HopfAlgebra) -> Module:
    mats = H.eps.reshape(H.n, 1, 1)
    return Module(H.algebra, mats, name="1", check=False)


def char_module(H: HopfAlgebra, scalars, name: str = "char") -> Module:
    mats = (np.asarray(scalars, dtype=np.int64) % H.p).reshape(H.n, 1, 1)
    return Module(H.algebra, mats, name=name)


def diagonal_tensor_module(H: HopfAlgebra, M: Module, N: Module,
                           name: Optional[str] = None) -> Module:
    """M (x) N with the Delta-diagonal action, carrier kron (M slow)."""
    n, p = H.n, H.p
    D3 = H.delta.reshape(n, n, n)  # D3[j,k,i]: coefficient of e_j(x)e_k in Delta(e_i)
    dM, dN = M.dim, N.dim
    mats = np.zeros((n, dM * dN, dM * dN), dtype=np.int64)
    for i in range(n):
        acc = np.zeros((dM * dN, dM * dN), dtype=np.int64)
        for j in range(n):
            for k in range(n):
                coef = int(D3[j, k, i])
                if coef:
                    acc = (acc + coef * kron(M.mats[j], N.mats[k], p)) % p
        mats[i] = acc
    return Module(H.algebra, mats, name=name or f"{M.name}(x){N.name}", check=False)


def tensor_many(H: HopfAlgebra, mods: Sequence[Module]) -> Module:
    if not mods:
        return unit_module(H)
    out = mods[0]
    for m in mods[1:]:
        out = diagonal_tensor_module(H, out, m)
    return out


def kappa_dual_module(H: HopfAlgebra, M: Module, kappa: int,
                      name: Optional[str] = None) -> Module:
    """M^[kappa]: action rho(S^kappa h), transposed when kappa is odd."""
    if kappa == 0:
        return M
    Sk = H.antipode_power(kappa)
    mats = np.einsum("ji,jab->iab", Sk, M.mats) % H.p
    if kappa % 2:
        mats = mats.transpose(0, 2, 1) % H.p
    return Module(H.algebra, mats,
                  name=name or f"{M.name}^[{kappa}]", check=False)


def dual_map_matrix(f: np.ndarray, kappa: int, p: int) -> np.ndarray:
    """The matrix of f^[kappa] in the dual-basis coordinates.

    Even kappa keeps the matrix (and the direction); odd kappa transposes
    it (and reverses the direction: a map M -> N induces N^[k] -> M^[k]).
    """
    f = np.asarray(f, dtype=np.int64) % p
    return f.T % p if kappa % 2 else f


def right_ev(M: Module) -> np.ndarray:
    """ev: M^[1] (x) M -> 1, xi (x) v -> xi(v); a (1, d^2) matrix."""
    d = M.dim
    return np.eye(d, dtype=np.int64).reshape(1, d * d)


def right_coev(M: Module) -> np.ndarray:
    """coev: 1 -> M (x) M^[1]; a (d^2, 1) matrix."""
    d = M.dim
    return np.eye(d, dtype=np.int64).reshape(d * d, 1)


def left_ev(M: Module) -> np.ndarray:
    """ev: M (x) M^[-1] -> 1, v (x) xi -> xi(v)."""
    d = M.dim
    return np.eye(d, dtype=np.int64).reshape(1, d * d)


def left_coev(M: Module) -> np.ndarray:
    """coev: 1 -> M^[-1] (x) M."""
    d = M.dim
    return np.eye(d, dtype=np.int64).reshape(d * d, 1)


def regular_hopf_module(H: HopfAlgebra) -> Module:
    return Module(H.algebra, H.algebra.basis_left_mults(),
                  name=f"{H.name}_reg", check=False)


def freeness_iso(H: HopfAlgebra) -> tuple[np.ndarray, np.ndarray]:
    """(u, u_inv) trivializing the second leg of P (x) P.

    u: a (x) b -> a_(1) (x) S(a_(2)) b carries the diagonal action on
    H (x) H to the action on the first factor alone, so P (x) P becomes
    visibly free with summands indexed by the second-factor basis.
    u_inv: a (x) b -> a_(1) (x) a_(2) b.
    """
    n, p = H.n, H.p
    eye = np.eye(n, dtype=np.int64)
    D3 = H.delta.reshape(n, n, n)
    u = np.zeros((n * n, n * n), dtype=np.int64)
    ui = np.zeros((n * n, n * n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            col = a * n + b
            for j in range(n):
                for k in range(n):
                    coef = int(D3[j, k, a])
                    if not coef:
                        continue
                    sk_b = H.algebra.left_mult_matrix(H.S[:, k])[:, b]
                    ek_b = H.algebra.left_mult_matrix(eye[k])[:, b]
                    u[:, col] = (u[:, col] + coef * np.kron(eye[j], sk_b)) % p
                    ui[:, col] = (ui[:, col] + coef * np.kron(eye[j], ek_b)) % p
    if np.any(mm(u, ui, p=p) != np.eye(n * n, dtype=np.int64)):
        raise AssertionError("freeness maps are not mutually inverse")
    return u, ui


# ---------------------------------------------------------------- integrals


@dataclass
class DistinguishedData:
    left_integral: np.ndarray   # Lambda with h.Lambda = eps(h) Lambda
    alpha: np.ndarray           # character with Lambda.h = alpha(h) Lambda
    counit: np.ndarray          # the trivial character, for comparison
    D: Module                   # the 1-dim alpha-twisted module

    def is_trivial(self) -> bool:
        """True iff the algebra is unimodular (alpha is the counit)."""
        return bool(np.all(self.alpha % self.D.p == self.counit % self.D.p))


def distinguished_data(H: HopfAlgebra) -> DistinguishedData:
    """Left integral, modular character, and the invertible object D.

    The left-integral space must be exactly 1-dimensional; anything else
    means the input is not a finite-dimensional Hopf algebra and is
    reported as a structural error.
    """
    n, p = H.n, H.p
    eye = np.eye(n, dtype=np.int64)
    L = H.algebra.basis_left_mults()
    rows = [
        (L[i] - int(H.eps[i]) * eye) % p
        for i in range(n)
    ]
    K = kernel_basis(np.vstack(rows), p)
    if K.shape[1] != 1:
        raise ValueError(
            f"left integral space has dimension {K.shape[1]}, expected 1: "
            "input is not a valid finite-dimensional Hopf algebra"
        )
    lam = K[:, 0] % p
    j = int(np.flatnonzero(lam)[0])
    inv_j = pow(int(lam[j]), p - 2, p)
    alpha = np.zeros(n, dtype=np.int64)
    for i in range(n):
        v = mm(H.algebra.right_mult_matrix(eye[i]), lam.reshape(n, 1), p=p).ravel()
        alpha[i] = v[j] * inv_j % p
        if np.any(v != alpha[i] * lam % p):
            raise ValueError("right action does not act by a scalar on the integral")
    # alpha must be an algebra character
    for i in range(n):
        for k in range(n):
            lhs = int(np.dot(alpha, H.algebra.c[i, k]) % p)
            if lhs != alpha[i] * alpha[k] % p:
                raise ValueError("modular element is not a character")
    D = char_module(H, alpha, name="D")
    return DistinguishedData(left_integral=lam, alpha=alpha,
                             counit=H.eps.copy(), D=D)


# ---------------------------------------------------------------- builtins


def group_algebra(p: int, elements: list, mult, inv, name: str) -> HopfAlgebra:
    """kG for a small group given by element list and mult/inv callables.

    The identity must come first in `elements`.  Rejects p dividing |G|:
    the downstream calculus needs the group algebras in the corpus to be
    split semisimple.
    """
    order = len(elements)
    if order % p == 0:
        raise ValueError(f"p = {p} divides |G| = {order}")
    idx = {g: i for i, g in enumerate(elements)}
    n = order
    c = np.zeros((n, n, n), dtype=np.int64)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            c[i, j, idx[mult(a, b)]] = 1
    unit = np.zeros(n, dtype=np.int64)
    unit[idx[elements[0]]] = 1
    A = Algebra(c, unit, p, name=name)
    delta = np.zeros((n * n, n), dtype=np.int64)
    for i in range(n):
        delta[i * n + i, i] = 1
    eps = np.ones(n, dtype=np.int64)
    S = np.zeros((n, n), dtype=np.int64)
    for i, g in enumerate(elements):
        S[idx[inv(g)], i] = 1
    return HopfAlgebra(A, delta, eps, S, name=name)


def cyclic_group_algebra(p: int, order: int, name: Optional[str] = None) -> HopfAlgebra:
    return group_algebra(
        p,
        list(range(order)),
        lambda a, b: (a + b) % order,
        lambda a: (-a) % order,
        name or f"kC{order}",
    )


def symmetric3_group_algebra(p: int) -> HopfAlgebra:
    elements = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (1, 0, 2), (0, 2, 1), (2, 1, 0)]

    def mult(a, b):  # (a o b)(i) = a[b[i]]
        return tuple(a[b[i]] for i in range(3))

    def inv(a):
        out = [0, 0, 0]
        for i in range(3):
            out[a[i]] = i
        return tuple(out)

    return group_algebra(p, elements, mult, inv, name="kS3")


def ground_field_hopf(p: int) -> HopfAlgebra:
    A = Algebra(np.ones((1, 1, 1), dtype=np.int64), [1], p, name="k")
    return HopfAlgebra(A, np.ones((1, 1)), [1], np.ones((1, 1)), name="k")


def sweedler_hopf(p: int) -> HopfAlgebra:
    """The 4-dimensional Hopf algebra with S^2 != id; basis 1, g, x, gx."""
    n = 4
    c = np.zeros((n, n, n), dtype=np.int64)

    def put(i, j, k, v):
        c[i, j, k] = v % p

    # products: rows are left factor 1, g, x, gx
    put(0, 0, 0, 1); put(0, 1, 1, 1); put(0, 2, 2, 1); put(0, 3, 3, 1)
    put(1, 0, 1, 1); put(1, 1, 0, 1); put(1, 2, 3, 1); put(1, 3, 2, 1)
    put(2, 0, 2, 1); put(2, 1, 3, -1)  # x g = -gx
    put(3, 0, 3, 1); put(3, 1, 2, -1)  # gx g = -x
    # x x = x gx = gx x = gx gx = 0
    A = Algebra(c, [1, 0, 0, 0], p, name="H4")
    delta = np.zeros((n * n, n), dtype=np.int64)

    def dput(col, j, k, v):
        delta[j * n + k, col] = v % p

    dput(0, 0, 0, 1)                      # Delta 1 = 1 (x) 1
    dput(1, 1, 1, 1)                      # Delta g = g (x) g
    dput(2, 2, 0, 1); dput(2, 1, 2, 1)    # Delta x = x (x) 1 + g (x) x
    dput(3, 3, 1, 1); dput(3, 0, 3, 1)    # Delta gx = gx (x) g + 1 (x) gx
    eps = np.array([1, 1, 0, 0], dtype=np.int64)
    S = np.zeros((n, n), dtype=np.int64)
    S[0, 0] = 1; S[1, 1] = 1; S[3, 2] = (-1) % p; S[2, 3] = 1
    return HopfAlgebra(A, delta, eps, S, name="H4")


def sweedler_indecomposables(H: HopfAlgebra) -> list[Module]:
    """P+, P-, k+, k-: every indecomposable of the 4-dimensional example.

    The two projectives are cut out of the regular module by the
    idempotents (1 +- g)/2; the two characters factor through eps and
    the grouplike sign.  Raises if H does not have that shape.
    """
    p = H.p
    if H.n != 4:
        raise ValueError("expected the 4-dimensional corpus Hopf algebra")
    reg = regular_hopf_module(H)
    half = pow(2, p - 2, p)
    x = np.eye(4, dtype=np.int64)[2]
    out = []
    for sign, tag in ((1, "P+"), (-1, "P-")):
        e = np.array([half, sign * half % p, 0, 0], dtype=np.int64) % p
        if np.any(H.algebra.multiply(e, e) != e):
            raise ValueError("(1 +- g)/2 is not idempotent in this algebra")
        span = np.stack([e, H.algebra.multiply(x, e)], axis=1) % p
        out.append(submodule(reg, span, name=tag))
    out.append(unit_module(H))
    out.append(char_module(H, [1, p - 1, 0, 0], "k-"))
    return out


def dual_cyclic2_hopf(p: int) -> HopfAlgebra:
    """(kC2)*: functions on C2 in the delta basis."""
    n = 2
    c = np.zeros((n, n, n), dtype=np.int64)
    c[0, 0, 0] = 1
    c[1, 1, 1] = 1
    A = Algebra(c, [1, 1], p, name="kC2*")
    delta = np.zeros((n * n, n), dtype=np.int64)
    # Delta d_a = sum_{xy=a} d_x (x) d_y over C2
    delta[0 * n + 0, 0] = 1
    delta[1 * n + 1, 0] = 1
    delta[0 * n + 1, 1] = 1
    delta[1 * n + 0, 1] = 1
    eps = np.array([1, 0], dtype=np.int64)
    S = np.eye(n, dtype=np.int64)
    return HopfAlgebra(A, delta, eps, S, name="kC2*")


def builtin_examples(p: int) -> dict[str, HopfAlgebra]:
    """The validated corpus: k, kC2, kC3, kS3, Sweedler H4, (kC2)*."""
    return {
        "k": ground_field_hopf(p),
        "kC2": cyclic_group_algebra(p, 2),
        "kC3": cyclic_group_algebra(p, 3),
        "kS3": symmetric3_group_algebra(p),
        "H4": sweedler_hopf(p),
        "kC2*": dual_cyclic2_hopf(p),
    }
