"""Matrices of wedge operators, the Hermitian form Q, and primitive subspaces.

All matrices use the lex-ordered monomial bases of :mod:`lkit.exterior`;
rows index the target space, columns the source space.  The norm on every
V^{p,q} is the coefficient l2 norm, so monomial bases are orthonormal.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .exterior import (
    Bidegree,
    Form,
    _conjugation_perm,
    _wedge_table,
    is_real,
    kahler_power,
    wedge,
)

__all__ = [
    "OperatorMatrix",
    "HermitianForm",
    "Subspace",
    "Signature",
    "wedge_operator",
    "top_scalar",
    "q_sign",
    "gram_Q",
    "primitive_basis",
    "classical_primitive_basis",
    "classical_lefschetz_decompose",
    "signature",
    "min_singular_value",
    "kernel",
    "image",
    "RANK_RTOL",
]

RANK_RTOL = 1e-9


@dataclass(frozen=True)
class OperatorMatrix:
    source: Bidegree
    target: Bidegree
    entries: np.ndarray

    @property
    def shape(self):
        return self.entries.shape

    @property
    def is_square(self) -> bool:
        return self.entries.shape[0] == self.entries.shape[1]

    def __call__(self, a: Form) -> Form:
        if a.bidegree != self.source:
            raise ValueError(f"operator acts on {self.source}, got {a.bidegree}")
        t = self.target
        return Form(t.n, t.p, t.q, self.entries @ a.coeffs)

    def singular_values(self) -> np.ndarray:
        if 0 in self.entries.shape:
            return np.zeros(0)
        return np.linalg.svd(self.entries, compute_uv=False)

    def norm(self) -> float:
        s = self.singular_values()
        return float(s[0]) if s.size else 0.0


def wedge_operator(phi: Form, source: Bidegree | tuple) -> OperatorMatrix:
    """Matrix of ``alpha -> phi ^ alpha`` on V^{source}."""
    if not isinstance(source, Bidegree):
        p, q = source
        source = Bidegree(p, q, phi.n)
    if source.n != phi.n:
        raise ValueError(f"operator on C^{phi.n} cannot act on {source}")
    target = source.shifted(phi.p, phi.q)
    if target.dim == 0 or source.dim == 0 or phi.coeffs.size == 0:
        return OperatorMatrix(source, target, np.zeros((target.dim, source.dim), dtype=complex))
    table = _wedge_table(phi.n, phi.p, phi.q, source.p, source.q)
    entries = (table @ phi.coeffs).reshape(target.dim, source.dim)
    return OperatorMatrix(source, target, entries)


def top_scalar(eta: Form) -> complex:
    """epsilon with ``eta = epsilon * omega^n / n!``; this is the Hodge star on V^{n,n}."""
    n = eta.n
    if (eta.p, eta.q) != (n, n):
        raise ValueError(f"top_scalar needs an (n,n)-form, got ({eta.p},{eta.q}) with n={n}")
    return complex(eta.coeffs[0] / 1j ** (n * n % 4))


def q_sign(p: int, q: int) -> complex:
    """i^{q-p} (-1)^{(p+q)(p+q+1)/2}."""
    s = p + q
    return 1j ** ((q - p) % 4) * (-1) ** (s * (s + 1) // 2)


@lru_cache(maxsize=None)
def _top_pairing(n: int, p: int, q: int) -> np.ndarray:
    """P[x, y] = top_scalar(f_x ^ g_y) for f in V^{n-q,n-p}, g in V^{q,p}."""
    table = _wedge_table(n, n - q, n - p, q, p)
    dim_g = Bidegree(q, p, n).dim
    P = table.toarray().reshape(1, dim_g, -1)[0].T
    return P / 1j ** (n * n % 4)


class HermitianForm:
    """A Hermitian form on V^{p,q}; ``matrix[a, b] = Q(e_a, e_b)``.

    ``Q(alpha, beta) = alpha^T H conj(beta)``, linear in the first slot.
    """

    def __init__(self, bidegree: Bidegree, matrix, check: bool = True):
        H = np.asarray(matrix, dtype=complex)
        if H.shape != (bidegree.dim, bidegree.dim):
            raise ValueError(f"Gram matrix shape {H.shape} does not match dim {bidegree.dim}")
        if check and H.size:
            scale = max(np.linalg.norm(H), 1.0)
            if np.linalg.norm(H - H.conj().T) > 1e-10 * scale:
                raise ValueError("matrix is not Hermitian")
        self.bidegree = bidegree
        self.matrix = H

    def __call__(self, a: Form, b: Form) -> complex:
        return complex(a.coeffs @ self.matrix @ np.conj(b.coeffs))

    def values(self, vecs) -> np.ndarray:
        """Q(v, v) for each column v of ``vecs`` (real parts)."""
        vecs = np.asarray(vecs, dtype=complex)
        return np.real(np.einsum("ak,ab,bk->k", vecs, self.matrix, vecs.conj()))

    def restrict(self, basis_matrix) -> np.ndarray:
        """Gram matrix of Q on the span of the columns of ``basis_matrix``."""
        B = np.asarray(basis_matrix, dtype=complex)
        return B.T @ self.matrix @ B.conj()

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix) if self.matrix.size else np.zeros(0)


def gram_Q(Omega: Form, p: int, q: int, real_tol: float = 1e-10) -> HermitianForm:
    """The form Q(alpha, beta) = i^{q-p}(-1)^{(p+q)(p+q+1)/2} * star(alpha ^ conj(beta) ^ Omega)."""
    n = Omega.n
    k = n - p - q
    if Omega.p != Omega.q or Omega.p != k:
        raise ValueError(f"Omega must have bidegree ({k},{k}) for (p,q)=({p},{q}), n={n}")
    if not is_real(Omega, real_tol * max(1.0, Omega.norm())):
        raise ValueError("Omega is not real")
    src = Bidegree(p, q, n)
    if src.dim == 0:
        return HermitianForm(src, np.zeros((0, 0)))
    # alpha ^ conj(beta) ^ Omega == (Omega ^ alpha) ^ conj(beta) since Omega has even degree
    M = wedge_operator(Omega, src).entries
    P = _top_pairing(n, p, q)
    conj_sign = -1.0 if (p * q) % 2 else 1.0
    C = P[:, _conjugation_perm(n, p, q)] * conj_sign
    H = q_sign(p, q) * (M.T @ C)
    H = 0.5 * (H + H.conj().T)
    return HermitianForm(src, H)


@dataclass(frozen=True)
class Subspace:
    bidegree: Bidegree
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def project(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        return self.basis @ (self.basis.conj().T @ v)

    def distance(self, v) -> float:
        v = np.asarray(v, dtype=complex)
        return float(np.linalg.norm(v - self.project(v)))

    def forms(self) -> list[Form]:
        b = self.bidegree
        return [Form(b.n, b.p, b.q, self.basis[:, j]) for j in range(self.dim)]


def kernel(A: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of the null space, relative cutoff ``rtol * sigma_max``."""
    A = np.asarray(A, dtype=complex)
    m, k = A.shape
    if k == 0:
        return np.zeros((0, 0), dtype=complex)
    if m == 0 or not np.any(A):
        return np.eye(k, dtype=complex)
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > rtol * s[0]))
    return vh[rank:].conj().T


def image(A: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of the column space."""
    A = np.asarray(A, dtype=complex)
    m, k = A.shape
    if m == 0 or k == 0 or not np.any(A):
        return np.zeros((m, 0), dtype=complex)
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(s > rtol * s[0]))
    return u[:, :rank]


def primitive_basis(Omega: Form, p: int, q: int, rtol: float = RANK_RTOL) -> Subspace:
    """P^{p,q} = {alpha : alpha ^ Omega ^ omega = 0}."""
    n = Omega.n
    k = n - p - q
    if (Omega.p, Omega.q) != (k, k):
        raise ValueError(f"Omega must have bidegree ({k},{k})")
    W = wedge_operator(wedge(Omega, kahler_power(1, n)), (p, q)).entries
    return Subspace(Bidegree(p, q, n), kernel(W, rtol))


def classical_primitive_basis(n: int, a: int, b: int, rtol: float = RANK_RTOL) -> Subspace:
    """Forms in V^{a,b} killed by omega^{n-a-b+1}."""
    W = wedge_operator(kahler_power(n - a - b + 1, n), (a, b)).entries
    return Subspace(Bidegree(a, b, n), kernel(W, rtol))


def classical_lefschetz_decompose(alpha: Form, rtol: float = RANK_RTOL) -> list[tuple[int, Form]]:
    """Write ``alpha = sum_j omega^j ^ gamma_j`` with each gamma_j classically primitive.

    Returns ``[(j, gamma_j), ...]`` for every j from 0 to min(a, b); pieces
    that vanish are returned as zero forms.
    """
    n, a, b = alpha.n, alpha.p, alpha.q
    if a + b > n:
        raise ValueError(f"decomposition needs a+b <= n, got ({a},{b}) with n={n}")
    blocks, spaces = [], []
    for j in range(min(a, b) + 1):
        P = classical_primitive_basis(n, a - j, b - j, rtol)
        L = wedge_operator(kahler_power(j, n), (a - j, b - j)).entries
        blocks.append(L @ P.basis)
        spaces.append(P)
    Z = np.hstack(blocks)
    c, *_ = np.linalg.lstsq(Z, alpha.coeffs, rcond=None)
    out, pos = [], 0
    for j, P in enumerate(spaces):
        cj = c[pos:pos + P.dim]
        pos += P.dim
        bd = P.bidegree
        out.append((j, Form(n, bd.p, bd.q, P.basis @ cj)))
    return out


class Signature(NamedTuple):
    n_plus: int
    n_minus: int
    n_zero: int


def signature(H, tol: float = 1e-9) -> Signature:
    """Counts of positive, negative and (relatively) zero eigenvalues."""
    M = H.matrix if isinstance(H, HermitianForm) else np.asarray(H, dtype=complex)
    if M.size == 0:
        return Signature(0, 0, 0)
    w = np.linalg.eigvalsh(M)
    cut = tol * np.max(np.abs(w))
    return Signature(int(np.sum(w > cut)), int(np.sum(w < -cut)), int(np.sum(np.abs(w) <= cut)))


def min_singular_value(A) -> float:
    """Smallest singular value; 0 for non-square input (check ``is_square``), inf for 0x0."""
    M = A.entries if isinstance(A, OperatorMatrix) else np.asarray(A)
    if M.shape[0] != M.shape[1]:
        return 0.0
    if M.size == 0:
        return float("inf")
    return float(sla.svdvals(M)[-1])
