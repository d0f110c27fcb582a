"""Block decomposition of split semisimple algebras over F_p.

Central primitive idempotents are found by simultaneously diagonalizing
the multiplication action of the center on itself: for a split
semisimple algebra the center is a product of copies of the field, so
refining eigenspaces along the center's own basis elements terminates
with one line per simple block.  Everything is verified on the way out
(orthogonality, completeness, square block dimensions), and a
non-semisimple or non-split input fails loudly rather than returning
garbage.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

from .algebra import Algebra, Module, hom_space, regular_module, submodule
from .linalg import is_invertible, kernel_basis, mm, rank, rref, solve


def center_basis(A: Algebra) -> np.ndarray:
    """Columns spanning the center {z : ze_i = e_iz for all i}."""
    L = A.basis_left_mults()
    R = A.basis_right_mults()
    rows = np.vstack([(L[i] - R[i]) % A.p for i in range(A.n)])
    return kernel_basis(rows, A.p)


def is_semisimple(A: Algebra) -> bool:
    """Trace-form test; valid here because p exceeds every block dimension."""
    L = A.basis_left_mults()
    gram = np.einsum("iab,jba->ij", L, L) % A.p
    return is_invertible(gram, A.p)


def central_primitive_idempotents(A: Algebra) -> list[np.ndarray]:
    """The central primitive idempotents of a split semisimple algebra.

    Deterministic: eigenspace refinement runs over the center's own basis
    elements, which always separates the blocks when the algebra is split.
    Raises ValueError when the input is not split semisimple.
    """
    p = A.p
    if not is_semisimple(A):
        raise ValueError(f"{A.name} is not semisimple: trace form is degenerate")
    Z = center_basis(A)
    r = Z.shape[1]
    # multiplication-by-z_i on the center, in center coordinates
    mults = []
    for i in range(r):
        cols = mm(A.left_mult_matrix(Z[:, i]), Z, p=p)
        X = solve(Z, cols, p=p)
        if X is None:
            raise ValueError("center is not closed under multiplication")
        mults.append(X % p)
    subspaces = [np.eye(r, dtype=np.int64)]
    for M in mults:
        refined = []
        for B in subspaces:
            if B.shape[1] == 1:
                refined.append(B)
                continue
            MB = solve(B, mm(M, B, p=p), p=p)
            if MB is None:
                raise ValueError("center eigenspace is not invariant")
            pieces = []
            for lam in range(p):
                K = kernel_basis((MB - lam * np.eye(B.shape[1], dtype=np.int64)) % p, p)
                if K.shape[1]:
                    pieces.append(mm(B, K, p=p))
            if sum(piece.shape[1] for piece in pieces) != B.shape[1]:
                raise ValueError(
                    f"center of {A.name} does not split over F_{p}: "
                    "eigenvalues missing from the base field"
                )
            refined.extend(pieces)
        subspaces = refined
    if any(B.shape[1] != 1 for B in subspaces):
        raise ValueError(f"center of {A.name} did not refine to lines")
    idempotents = []
    for B in subspaces:
        v = mm(Z, B, p=p).ravel()
        w = A.multiply(v, v)
        j = int(np.flatnonzero(v)[0])
        c = w[j] * pow(int(v[j]), p - 2, p) % p
        if c == 0 or np.any(w != c * v % p):
            raise ValueError(f"{A.name} has a non-idempotent central line")
        e = v * pow(int(c), p - 2, p) % p
        idempotents.append(e)
    total = np.zeros(A.n, dtype=np.int64)
    for e in idempotents:
        total = (total + e) % p
    if np.any(total != A.unit % p):
        raise AssertionError("central idempotents do not sum to the unit")
    for i, e in enumerate(idempotents):
        for f in idempotents[i + 1:]:
            if np.any(A.multiply(e, f)):
                raise AssertionError("central idempotents are not orthogonal")
    idempotents.sort(key=lambda e: e.tolist())
    return idempotents


@dataclass
class SimpleBlock:
    idempotent: np.ndarray
    dim: int  # dimension of the corresponding simple module


def simple_blocks(A: Algebra) -> list[SimpleBlock]:
    """Blocks sorted by (simple dimension, idempotent entries)."""
    out = []
    for e in central_primitive_idempotents(A):
        block_dim = rank(A.left_mult_matrix(e), A.p)
        d = isqrt(block_dim)
        if d * d != block_dim:
            raise ValueError(
                f"block of dimension {block_dim} in {A.name} is not a "
                "matrix algebra over the base field"
            )
        out.append(SimpleBlock(idempotent=e, dim=d))
    out.sort(key=lambda b: (b.dim, b.idempotent.tolist()))
    return out


def simple_dims(A: Algebra) -> list[int]:
    return sorted(b.dim for b in simple_blocks(A))


def simple_modules(A: Algebra, seed: int = 0) -> list[Module]:
    """One copy of each simple module, in simple_blocks order.

    The regular module cut down to a block is d copies of that block's
    simple, so a generic endomorphism acts as a generic d x d matrix on
    the multiplicity space and any eigenvalue with a d-dimensional
    eigenspace cuts out a single copy.
    """
    p = A.p
    reg = regular_module(A)
    rng = np.random.default_rng(seed)
    out = []
    for b in simple_blocks(A):
        Le = A.left_mult_matrix(b.idempotent)
        cols = Le[:, rref(Le, p)[1]] % p
        blk = submodule(reg, cols, name=f"{A.name}e")
        d = b.dim
        if blk.dim == d:
            out.append(Module(A, blk.mats, name=f"{A.name}S{d}", check=False))
            continue
        homs = hom_space(blk, blk, seed=seed)
        found = None
        for _ in range(60):
            coeff = rng.integers(0, p, size=len(homs))
            phi = np.zeros((blk.dim, blk.dim), dtype=np.int64)
            for c, h in zip(coeff, homs):
                phi = (phi + int(c) * h) % p
            for lam in range(p):
                K = kernel_basis((phi - lam * np.eye(blk.dim, dtype=np.int64)) % p, p)
                if K.shape[1] == d:
                    found = submodule(blk, K, name=f"{A.name}S{d}")
                    break
            if found is not None:
                break
        if found is None:
            raise ValueError(
                f"no multiplicity-one eigenspace found in a block of {A.name}; "
                "the block may not split over the base field"
            )
        out.append(found)
    return out


def module_multiplicities(A: Algebra, M: Module,
                          blocks: list[SimpleBlock] | None = None) -> list[int]:
    """Multiplicity of each simple (in simple_blocks order) inside M."""
    if blocks is None:
        blocks = simple_blocks(A)
    out = []
    for b in blocks:
        r = rank(M.action(b.idempotent), M.p)
        if r % b.dim:
            raise ValueError(
                f"rank {r} of idempotent action is not divisible by the "
                f"simple dimension {b.dim}"
            )
        out.append(r // b.dim)
    if sum(m * b.dim for m, b in zip(out, blocks)) != M.dim:
        raise AssertionError("multiplicities do not exhaust the module")
    return out
