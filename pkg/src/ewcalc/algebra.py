"""Finite-dimensional associative algebras and their module categories.

An algebra is given by structure constants c[i,j,k] (e_i e_j = sum_k
c[i,j,k] e_k) over F_p; a module by one action matrix per basis element.
This is the concrete form of "finite linear category" used everywhere:
a category is Mod_A for some A, objects are Modules, morphisms are
intertwiners found by exact linear algebra.

Right modules are carried as left modules over the opposite algebra
throughout; bimodules store both action families and validate that they
commute, materializing the tensor algebra only on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .linalg import (
    cokernel,
    find_invertible_in_span,
    inverse,
    kernel_basis,
    kron,
    mm,
    quotient_section,
    rank,
    solve,
)


class Algebra:
    """Associative unital algebra via structure constants mod p."""

    def __init__(self, c, unit, p: int, name: str = "A", check: bool = True):
        self.c = np.asarray(c, dtype=np.int64) % p
        self.unit = np.asarray(unit, dtype=np.int64) % p
        self.p = p
        self.name = name
        n = self.c.shape[0]
        if self.c.shape != (n, n, n):
            raise ValueError(f"structure constants must be cubic, got {self.c.shape}")
        if self.unit.shape != (n,):
            raise ValueError("unit vector has wrong length")
        self.n = n
        if check:
            bad = validate_algebra(self)
            if bad:
                raise ValueError(f"invalid algebra {name}: {bad[0]} (+{len(bad) - 1} more)"
                                 if len(bad) > 1 else f"invalid algebra {name}: {bad[0]}")

    def multiply(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64) % self.p
        b = np.asarray(b, dtype=np.int64) % self.p
        return np.einsum("i,j,ijk->k", a, b, self.c) % self.p

    def left_mult_matrix(self, v) -> np.ndarray:
        # (v * e_j)_k
        v = np.asarray(v, dtype=np.int64) % self.p
        return np.einsum("i,ijk->kj", v, self.c) % self.p

    def right_mult_matrix(self, v) -> np.ndarray:
        # (e_i * v)_k
        v = np.asarray(v, dtype=np.int64) % self.p
        return np.einsum("j,ijk->ki", v, self.c) % self.p

    def basis_left_mults(self) -> np.ndarray:
        return self.c.transpose(0, 2, 1) % self.p

    def basis_right_mults(self) -> np.ndarray:
        return self.c.transpose(1, 2, 0) % self.p

    def __repr__(self):
        return f"Algebra({self.name}, dim {self.n}, p={self.p})"


def validate_algebra(A: Algebra, max_reports: int = 8) -> list[str]:
    """Every violated associativity/unit instance, empty iff valid."""
    p, c = A.p, A.c
    lhs = np.einsum("ijm,mkl->ijkl", c, c) % p
    rhs = np.einsum("jkm,iml->ijkl", c, c) % p
    out = []
    bad = np.argwhere((lhs - rhs) % p != 0)
    for i, j, k, _l in bad[:max_reports]:
        t = (int(i), int(j), int(k))
        msg = f"associativity fails at basis triple {t}"
        if msg not in out:
            out.append(msg)
    lu = A.left_mult_matrix(A.unit)
    ru = A.right_mult_matrix(A.unit)
    eye = np.eye(A.n, dtype=np.int64)
    if np.any(lu != eye):
        out.append("unit is not a left unit")
    if np.any(ru != eye):
        out.append("unit is not a right unit")
    return out


def opposite_algebra(A: Algebra) -> Algebra:
    return Algebra(A.c.transpose(1, 0, 2), A.unit, A.p, name=f"{A.name}^op")


def tensor_algebra(A: Algebra, B: Algebra) -> Algebra:
    """A (x) B with basis e_i (x) f_a ordered left factor slow."""
    if A.p != B.p:
        raise ValueError("mixed moduli")
    nA, nB = A.n, B.n
    c = np.einsum("ijk,abc->iajbkc", A.c, B.c) % A.p
    c = c.reshape(nA * nB, nA * nB, nA * nB)
    unit = np.kron(A.unit, B.unit) % A.p
    return Algebra(c, unit, A.p, name=f"{A.name}(x){B.name}")


class Module:
    """Left module: one d x d action matrix per algebra basis element."""

    def __init__(self, algebra: Algebra, mats, name: str = "M", check: bool = True):
        self.algebra = algebra
        self.mats = np.asarray(mats, dtype=np.int64) % algebra.p
        self.name = name
        if self.mats.ndim != 3 or self.mats.shape[0] != algebra.n:
            raise ValueError(
                f"need {algebra.n} action matrices, got shape {self.mats.shape}"
            )
        if self.mats.shape[1] != self.mats.shape[2]:
            raise ValueError("action matrices must be square")
        if check:
            bad = validate_module(self)
            if bad:
                raise ValueError(f"invalid module {name}: {bad[0]}")

    @property
    def dim(self) -> int:
        return self.mats.shape[1]

    @property
    def p(self) -> int:
        return self.algebra.p

    def action(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64) % self.p
        return np.einsum("i,ijk->jk", v, self.mats) % self.p

    def __repr__(self):
        return f"Module({self.name}, dim {self.dim} over {self.algebra.name})"


def validate_module(M: Module, max_reports: int = 8) -> list[str]:
    A, p = M.algebra, M.p
    out = []
    # rho_i rho_j = sum_k c[i,j,k] rho_k
    lhs = np.einsum("iab,jbc->ijac", M.mats, M.mats) % p
    rhs = np.einsum("ijk,kac->ijac", A.c, M.mats) % p
    bad = np.argwhere((lhs - rhs) % p != 0)
    seen = set()
    for i, j, _a, _b in bad:
        t = (int(i), int(j))
        if t not in seen:
            seen.add(t)
            out.append(f"action violates structure constants at pair {t}")
            if len(out) >= max_reports:
                break
    if np.any(M.action(A.unit) != np.eye(M.dim, dtype=np.int64)):
        out.append("unit does not act as identity")
    return out


@dataclass
class ModuleMap:
    source: Module
    target: Module
    f: np.ndarray

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=np.int64) % self.source.p
        if self.f.shape != (self.target.dim, self.source.dim):
            raise ValueError("matrix shape does not match source/target dims")

    def is_intertwiner(self) -> bool:
        p = self.source.p
        for i in range(self.source.algebra.n):
            if np.any(
                mm(self.f, self.source.mats[i], p=p)
                != mm(self.target.mats[i], self.f, p=p)
            ):
                return False
        return True


def regular_module(A: Algebra, name: Optional[str] = None) -> Module:
    return Module(A, A.basis_left_mults(), name=name or f"{A.name}_reg")


def coregular_module(A: Algebra, name: Optional[str] = None) -> Module:
    """Linear dual of the regular right module: the injective cogenerator.

    Carrier A*, action rho(v) = (right mult by v)^T; end computations
    probe with this object.
    """
    mats = np.array([A.right_mult_matrix(e).T for e in np.eye(A.n, dtype=np.int64)])
    return Module(A, mats % A.p, name=name or f"{A.name}_coreg")


def coregular_end_maps(A: Algebra) -> np.ndarray:
    """Endomorphisms e_h = (left mult by h)^T of the coregular module.

    h -> e_h is an anti-homomorphism; these are the wedge maps for
    one-probe end computations.
    """
    return np.array(
        [A.left_mult_matrix(e).T % A.p for e in np.eye(A.n, dtype=np.int64)]
    )


def trivial_module_like(A: Algebra, scalars) -> Module:
    """One-dimensional module from a character given as scalars per basis."""
    mats = np.array([[[int(s) % A.p]] for s in scalars], dtype=np.int64)
    return Module(A, mats, name="char")


def direct_sum(M: Module, N: Module, name: Optional[str] = None) -> Module:
    if M.algebra is not N.algebra and M.algebra.name != N.algebra.name:
        raise ValueError("direct sum needs a common algebra")
    d1, d2 = M.dim, N.dim
    mats = np.zeros((M.algebra.n, d1 + d2, d1 + d2), dtype=np.int64)
    mats[:, :d1, :d1] = M.mats
    mats[:, d1:, d1:] = N.mats
    return Module(M.algebra, mats, name=name or f"{M.name}(+){N.name}", check=False)


def submodule(M: Module, basis: np.ndarray, name: str = "sub") -> Module:
    """Action restricted to the invariant subspace spanned by basis columns.

    Raises ValueError when the span is not actually invariant.
    """
    p = M.p
    mats = []
    for i in range(M.algebra.n):
        X = solve(basis, mm(M.mats[i], basis, p=p), p=p)
        if X is None:
            raise ValueError("subspace is not invariant under the action")
        mats.append(X % p)
    return Module(M.algebra, np.array(mats), name=name, check=False)


def quotient_module(M: Module, rel: np.ndarray,
                    name: str = "quot") -> tuple[Module, np.ndarray, np.ndarray]:
    """M modulo the column span of rel: (quotient, projection, section).

    The span must be invariant; the descended action is asserted rather
    than assumed.
    """
    p = M.p
    q, dim = cokernel(np.asarray(rel, dtype=np.int64) % p, p)
    s = quotient_section(q, p)
    mats = np.zeros((M.algebra.n, dim, dim), dtype=np.int64)
    for i in range(M.algebra.n):
        mats[i] = mm(q, M.mats[i], s, p=p)
        if np.any(mm(mats[i], q, p=p) != mm(q, M.mats[i], p=p)):
            raise ValueError("relation span is not invariant under the action")
    return Module(M.algebra, mats, name=name, check=False), q, s


def conjugate_module(M: Module, g: np.ndarray, name: Optional[str] = None) -> Module:
    """Same module in a new basis: action g rho g^{-1}."""
    p = M.p
    gi = inverse(np.asarray(g, dtype=np.int64), p)
    if gi is None:
        raise ValueError("change of basis must be invertible")
    mats = np.array([mm(g, m, gi, p=p) for m in M.mats])
    return Module(M.algebra, mats, name=name or f"{M.name}~", check=False)


def linear_dual_module(M: Module, name: Optional[str] = None) -> Module:
    """M* as a module over A^op (action matrices transposed)."""
    Aop = opposite_algebra(M.algebra)
    mats = np.array([m.T % M.p for m in M.mats])
    return Module(Aop, mats, name=name or f"{M.name}*", check=False)


def _intertwiner_kernel(
    gens_src: Sequence[np.ndarray], gens_tgt: Sequence[np.ndarray], p: int
) -> np.ndarray:
    """Kernel of f . src - tgt . f = 0 stacked over generator pairs.

    Row-major vec: vec(A X B) = (A kron B^T) vec(X); f is (dt x ds).
    """
    ds = gens_src[0].shape[0] if gens_src else 0
    dt = gens_tgt[0].shape[0] if gens_tgt else 0
    eye_t = np.eye(dt, dtype=np.int64)
    eye_s = np.eye(ds, dtype=np.int64)
    blocks = []
    for gs, gt in zip(gens_src, gens_tgt):
        blocks.append((kron(eye_t, gs.T % p, p) - kron(gt % p, eye_s, p)) % p)
    if not blocks:
        return np.eye(dt * ds, dtype=np.int64)
    return kernel_basis(np.vstack(blocks), p)


def hom_space(M: Module, N: Module, seed: int = 0) -> list[np.ndarray]:
    """Basis of Hom_A(M, N) as (dim N x dim M) matrices.

    Solves the intertwiner system over a small generating set first and
    enlarges it until every candidate passes against the full basis, which
    keeps the stacked system small for large algebras.
    """
    if M.algebra.n != N.algebra.n or M.p != N.p:
        raise ValueError("hom_space needs modules over the same algebra")
    A, p = M.algebra, M.p
    n = A.n
    rng = np.random.default_rng(seed)
    gen_idx: list[np.ndarray] = [A.unit.copy()]
    for _ in range(min(2, n)):
        gen_idx.append(rng.integers(0, p, size=n))
    for _attempt in range(n + 2):
        gs = [M.action(v) for v in gen_idx]
        gt = [N.action(v) for v in gen_idx]
        K = _intertwiner_kernel(gs, gt, p)
        mats = [K[:, j].reshape(N.dim, M.dim) for j in range(K.shape[1])]
        # verify against the full basis; collect a failing element if any
        bad = None
        for i in range(n):
            for f in mats:
                if np.any(mm(f, M.mats[i], p=p) != mm(N.mats[i], f, p=p)):
                    bad = i
                    break
            if bad is not None:
                break
        if bad is None:
            return mats
        e = np.zeros(n, dtype=np.int64)
        e[bad] = 1
        gen_idx.append(e)
    raise AssertionError("hom_space generating set failed to stabilize")


def hom_dim(M: Module, N: Module) -> int:
    return len(hom_space(M, N))


@dataclass
class IsoResult:
    status: str  # yes | no | undecided
    f: Optional[np.ndarray] = None
    f_inv: Optional[np.ndarray] = None

    def __bool__(self):
        return self.status == "yes"


def is_isomorphic(M: Module, N: Module, seed: int = 0, trials: int = 64) -> IsoResult:
    """Tri-state isomorphism test with a two-way certificate on success.

    `no` is only returned on structural grounds (dimension mismatch, or an
    empty Hom space in either direction); a fruitless randomized search
    yields `undecided`.
    """
    if M.dim != N.dim:
        return IsoResult("no")
    if M.dim == 0:
        return IsoResult("yes", np.zeros((0, 0), dtype=np.int64),
                         np.zeros((0, 0), dtype=np.int64))
    homs = hom_space(M, N, seed=seed)
    if not homs:
        return IsoResult("no")
    if not hom_space(N, M, seed=seed):
        return IsoResult("no")
    f = find_invertible_in_span(homs, M.p, trials=trials, seed=seed)
    if f is None:
        return IsoResult("undecided")
    fi = inverse(f, M.p)
    assert fi is not None
    assert ModuleMap(M, N, f).is_intertwiner()
    assert ModuleMap(N, M, fi).is_intertwiner()
    return IsoResult("yes", f, fi)


class Bimodule:
    """A-B-bimodule as commuting left/right action families.

    Underlying module over A (x) B^op is materialized by as_module() only
    when needed; validation happens on the action pairs directly.
    """

    def __init__(self, left_algebra: Algebra, right_algebra: Algebra,
                 left_mats, right_mats, name: str = "X", check: bool = True):
        self.left_algebra = left_algebra
        self.right_algebra = right_algebra
        p = left_algebra.p
        if right_algebra.p != p:
            raise ValueError("mixed moduli")
        self.left_mats = np.asarray(left_mats, dtype=np.int64) % p
        self.right_mats = np.asarray(right_mats, dtype=np.int64) % p
        self.name = name
        if check:
            bad = self.validate()
            if bad:
                raise ValueError(f"invalid bimodule {name}: {bad[0]}")

    @property
    def p(self) -> int:
        return self.left_algebra.p

    @property
    def dim(self) -> int:
        return self.left_mats.shape[1]

    def left_module(self) -> Module:
        return Module(self.left_algebra, self.left_mats, name=f"{self.name}_L",
                      check=False)

    def right_as_op_module(self) -> Module:
        """The right action as a left module over B^op."""
        return Module(opposite_algebra(self.right_algebra), self.right_mats,
                      name=f"{self.name}_R", check=False)

    def validate(self, max_reports: int = 8) -> list[str]:
        out = validate_module(self.left_module(), max_reports)
        out += [f"right action: {m}"
                for m in validate_module(self.right_as_op_module(), max_reports)]
        p = self.p
        for i in range(self.left_algebra.n):
            for j in range(self.right_algebra.n):
                if np.any(mm(self.left_mats[i], self.right_mats[j], p=p)
                          != mm(self.right_mats[j], self.left_mats[i], p=p)):
                    out.append(f"left/right actions do not commute at ({i},{j})")
                    if len(out) >= max_reports:
                        return out
        return out

    def as_module(self, name: Optional[str] = None) -> Module:
        """Module over A (x) B^op, basis e_i (x) f_j with i slow."""
        T = tensor_algebra(self.left_algebra, opposite_algebra(self.right_algebra))
        nA, nB = self.left_algebra.n, self.right_algebra.n
        p = self.p
        mats = np.zeros((nA * nB, self.dim, self.dim), dtype=np.int64)
        for i in range(nA):
            for j in range(nB):
                mats[i * nB + j] = mm(self.left_mats[i], self.right_mats[j], p=p)
        return Module(T, mats, name=name or self.name, check=False)

    def __repr__(self):
        return (f"Bimodule({self.name}, dim {self.dim}, "
                f"{self.left_algebra.name}|{self.right_algebra.name})")


def regular_bimodule(A: Algebra) -> Bimodule:
    return Bimodule(A, A, A.basis_left_mults(), A.basis_right_mults(),
                    name=f"{A.name}_reg")


@dataclass
class TensorOverResult:
    dim: int
    projection: np.ndarray           # from X (x) Y onto the quotient
    section: np.ndarray
    x_residual: list[np.ndarray]     # descended extra actions on the X side
    y_residual: list[np.ndarray]


def tensor_over(A: Algebra, X: Module, Y: Module,
                x_extra: Sequence[np.ndarray] = (),
                y_extra: Sequence[np.ndarray] = ()) -> TensorOverResult:
    """X (x)_A Y for X a right A-module (given over A^op) and Y a left one.

    Computed as the cokernel of span{x.a (x) y - x (x) a.y}.  Matrices in
    x_extra/y_extra must commute with the A-actions; they descend to the
    quotient and the descent equation is asserted, not assumed.
    """
    p = A.p
    if X.algebra.n != A.n or Y.algebra.n != A.n:
        raise ValueError("tensor_over arguments must live over the given algebra")
    dX, dY = X.dim, Y.dim
    eyeX = np.eye(dX, dtype=np.int64)
    eyeY = np.eye(dY, dtype=np.int64)
    blocks = []
    for i in range(A.n):
        # X is a module over A^op, so X.mats[i] is "right multiplication by e_i"
        blocks.append((kron(X.mats[i], eyeY, p) - kron(eyeX, Y.mats[i], p)) % p)
    rel = np.hstack(blocks) if blocks else np.zeros((dX * dY, 0), dtype=np.int64)
    q, dim = cokernel(rel, p)
    s = quotient_section(q, p) if dim else np.zeros((dX * dY, 0), dtype=np.int64)

    def descend(u: np.ndarray, side: str) -> np.ndarray:
        big = kron(u, eyeY, p) if side == "x" else kron(eyeX, u, p)
        bar = mm(q, big, s, p=p)
        if np.any(mm(bar, q, p=p) != mm(q, big, p=p)):
            raise AssertionError("extra action does not descend to the quotient")
        return bar

    return TensorOverResult(
        dim=dim,
        projection=q,
        section=s,
        x_residual=[descend(u, "x") for u in x_extra],
        y_residual=[descend(u, "y") for u in y_extra],
    )
