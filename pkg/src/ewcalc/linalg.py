"""Exact dense linear algebra over a prime field F_p.

Everything downstream (algebras, modules, coends, centers) reduces to the
handful of primitives here: solving linear systems, kernels, cokernels,
Kronecker products, and randomized search for an invertible element of a
span of square matrices.

Matrices are numpy int64 arrays with entries reduced mod p.  All routines
are pure and take the modulus explicitly.  With the default p = 109 and
desk-scale dimensions the intermediate dot products stay far below 2**63,
so plain integer matmul followed by ``% p`` is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

DEFAULT_PRIME = 109


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Field:
    """The prime field F_p, p an odd prime."""

    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")
        if self.p == 2:
            raise ValueError("p = 2 is excluded (characteristic-2 degeneracies)")

    def reduce(self, a) -> np.ndarray:
        return np.asarray(a, dtype=np.int64) % self.p


class Matrix:
    """Validated row-major matrix value for the serialization surface.

    Engine internals pass bare numpy arrays; this wrapper exists so that
    definition files deserialize into something that checks its own shape.
    """

    def __init__(self, rows: int, cols: int, entries: Sequence[int], p: int):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        entries = list(entries)
        if len(entries) != rows * cols:
            raise ValueError(
                f"entry count {len(entries)} != rows*cols = {rows * cols}"
            )
        self.rows = rows
        self.cols = cols
        self.p = p
        self.a = (np.array(entries, dtype=np.int64) % p).reshape(rows, cols)

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols} mod {self.p})"


def _inv_mod(a: int, p: int) -> int:
    return pow(int(a) % p, p - 2, p)


def mm(*mats: np.ndarray, p: int) -> np.ndarray:
    """Product of several matrices, reducing mod p after each step."""
    out = np.asarray(mats[0], dtype=np.int64) % p
    for m in mats[1:]:
        out = (out @ (np.asarray(m, dtype=np.int64) % p)) % p
    return out


def rref(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot column indices."""
    R = np.asarray(A, dtype=np.int64).copy() % p
    m, n = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = None
        for i in range(r, m):
            if R[i, c] % p:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        R[r] = (R[r] * _inv_mod(R[r, c], p)) % p
        for i in range(m):
            if i != r and R[i, c]:
                R[i] = (R[i] - R[i, c] * R[r]) % p
        pivots.append(c)
        r += 1
    return R % p, pivots


def rank(A: np.ndarray, p: int) -> int:
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return 0
    return len(rref(A, p)[1])


def solve(A: np.ndarray, b: np.ndarray, p: int) -> Optional[np.ndarray]:
    """Some x with A @ x = b mod p (free variables set to 0), or None.

    b may be a vector or a matrix of right-hand sides; the answer has the
    matching shape.
    """
    A = np.asarray(A, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    vec = b.ndim == 1
    B = b.reshape(-1, 1) if vec else b
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"row mismatch: A has {A.shape[0]}, b has {B.shape[0]}")
    m, n = A.shape
    k = B.shape[1]
    R, pivots = rref(np.hstack([A, B]), p)
    # consistency: no pivot may land in the RHS block
    for c in pivots:
        if c >= n:
            return None
    x = np.zeros((n, k), dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = R[i, n:]
    return x.reshape(-1) if vec else x


def kernel_basis(A: np.ndarray, p: int) -> np.ndarray:
    """Columns form a basis of ker A; shape (cols(A), nullity)."""
    A = np.asarray(A, dtype=np.int64) % p
    m, n = A.shape
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    R, pivots = rref(A, p)
    free = [c for c in range(n) if c not in pivots]
    K = np.zeros((n, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        K[fc, j] = 1
        for i, c in enumerate(pivots):
            K[c, j] = (-R[i, fc]) % p
    return K


def cokernel(A: np.ndarray, p: int) -> tuple[np.ndarray, int]:
    """Surjective projection q with q @ A = 0; returns (q, dim coker).

    q has full row rank rows(A) - rank(A); rows are a basis of the left
    null space, so the quotient map is realized explicitly.
    """
    A = np.asarray(A, dtype=np.int64) % p
    K = kernel_basis(A.T, p)  # columns: left null vectors
    q = K.T % p
    return q, q.shape[0]


def quotient_section(q: np.ndarray, p: int) -> np.ndarray:
    """A right inverse s of a surjective q (q @ s = I)."""
    d = q.shape[0]
    s = solve(q, np.eye(d, dtype=np.int64), p)
    if s is None:
        raise ValueError("projection is not surjective")
    return s


def kron(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Kronecker product, left factor slow (numpy convention)."""
    A = np.asarray(A, dtype=np.int64) % p
    B = np.asarray(B, dtype=np.int64) % p
    return np.kron(A, B) % p


def kron_all(mats: Sequence[np.ndarray], p: int) -> np.ndarray:
    out = np.asarray(mats[0], dtype=np.int64) % p
    for m in mats[1:]:
        out = np.kron(out, np.asarray(m, dtype=np.int64) % p) % p
    return out


def kron_swap_perm(m: int, n: int) -> np.ndarray:
    """Permutation S with S @ (a kron b) @ S.T = b kron a for a m-dim, b n-dim.

    S sends basis vector e_i tensor e_j (i < m slow) to e_j tensor e_i.
    """
    S = np.zeros((m * n, m * n), dtype=np.int64)
    for i in range(m):
        for j in range(n):
            S[j * m + i, i * n + j] = 1
    return S


def inverse(A: np.ndarray, p: int) -> Optional[np.ndarray]:
    A = np.asarray(A, dtype=np.int64)
    if A.shape[0] != A.shape[1]:
        return None
    X = solve(A, np.eye(A.shape[0], dtype=np.int64), p)
    if X is None:
        return None
    if np.any(mm(A, X, p=p) != np.eye(A.shape[0], dtype=np.int64) % p):
        return None
    return X


def is_invertible(A: np.ndarray, p: int) -> bool:
    A = np.asarray(A, dtype=np.int64)
    return A.shape[0] == A.shape[1] and rank(A, p) == A.shape[0]


def find_invertible_in_span(
    basis: Sequence[np.ndarray],
    p: int,
    trials: int = 64,
    seed: int = 0,
) -> Optional[np.ndarray]:
    """An invertible linear combination of `basis`, or None.

    Deterministic given the seed: tries each basis element and their sum
    first, then seeded random coefficient vectors.  None means "not found
    within budget" — callers must treat it as undecided, not as a proof.
    """
    basis = [np.asarray(b, dtype=np.int64) % p for b in basis]
    if not basis:
        return None
    n = basis[0].shape[0]
    for b in basis:
        if b.shape != (n, n):
            raise ValueError("span members must be square and same size")
    for cand in [*basis, sum(basis) % p]:
        if is_invertible(cand, p):
            return cand % p
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        coeffs = rng.integers(0, p, size=len(basis))
        cand = sum(int(c) * b for c, b in zip(coeffs, basis)) % p
        if is_invertible(cand, p):
            return cand
    return None
