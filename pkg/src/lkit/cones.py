"""Kahler forms, positive (k,k)-forms, Timorin products and the Griffiths cone."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from .exterior import (
    Form,
    FormParseError,
    basis,
    coefficient_matrix,
    conjugate,
    form_from_dict,
    form_to_dict,
    hermitian_form,
    kahler_power,
    wedge,
)
from .paths import DeformationPath, kahler_tuple_path

__all__ = [
    "KahlerForm",
    "GriffithsMatrix",
    "PositivityCertificate",
    "StrictPositivityResult",
    "sample_kahler",
    "timorin_product",
    "form_determinant",
    "griffiths_positivity",
    "griffiths_path",
    "griffiths_deformation",
    "griffiths_block_extension",
    "sample_griffiths",
    "sample_positive_form",
    "strict_positivity_check",
    "haar_frame",
    "griffiths_to_dict",
    "griffiths_from_dict",
]


@dataclass(frozen=True)
class KahlerForm:
    """i * sum h_jl dz_j ^ dzb_l with h Hermitian positive-definite."""

    h: np.ndarray
    min_eigenvalue: float = field(init=False)

    def __post_init__(self):
        h = np.array(self.h, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("h must be square")
        if np.linalg.norm(h - h.conj().T) > 1e-12 * max(1.0, np.linalg.norm(h)):
            raise ValueError("h is not Hermitian")
        h = 0.5 * (h + h.conj().T)
        lam = float(np.linalg.eigvalsh(h)[0])
        if lam <= 0:
            raise ValueError(f"h is not positive-definite (min eigenvalue {lam:.3g})")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "min_eigenvalue", lam)

    @classmethod
    def standard(cls, n: int) -> "KahlerForm":
        return cls(np.eye(n))

    @property
    def n(self) -> int:
        return self.h.shape[0]

    @property
    def form(self) -> Form:
        return hermitian_form(self.h)


def sample_kahler(n: int, rng: np.random.Generator, condition_cap: float = 1e3) -> KahlerForm:
    """h = A A* + eps I with complex Gaussian A and eps set so cond(h) <= condition_cap."""
    if n < 1:
        raise ValueError("n must be positive")
    if condition_cap < 1:
        raise ValueError("condition_cap must be >= 1")
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = A @ A.conj().T
    h = 0.5 * (h + h.conj().T)
    w = np.linalg.eigvalsh(h)
    lo, hi = w[0], w[-1]
    if condition_cap == 1:
        return KahlerForm(np.mean(w) * np.eye(n))
    eps = max(0.0, (hi - condition_cap * lo) / (condition_cap - 1))
    # a hair extra so rounding cannot push the ratio above the cap
    eps = eps * (1 + 1e-9) + (1e-12 * hi if eps > 0 else 0.0)
    return KahlerForm(h + eps * np.eye(n))


def timorin_product(factors: Sequence[KahlerForm]) -> tuple[Form, DeformationPath]:
    """Omega = omega_1 ^ ... ^ omega_k and the path deforming each factor to omega."""
    if not factors:
        raise ValueError("need at least one Kahler factor")
    n = factors[0].n
    if any(f.n != n for f in factors):
        raise ValueError("factors live on different spaces")
    if len(factors) > n:
        raise ValueError(f"k={len(factors)} exceeds n={n}")
    path = kahler_tuple_path([f.form for f in factors])
    return path.start, path


# -- Griffiths matrices -------------------------------------------------------

class GriffithsMatrix:
    """Hermitian k x k matrix of (1,1)-forms stored as a tensor.

    ``h[a, b, j, l]`` is the coefficient with
    ``alpha_ab = i * sum_{j,l} h[a, b, j, l] dz_j ^ dzb_l``.
    """

    def __init__(self, h, check: bool = True, tol: float = 1e-10):
        h = np.array(h, dtype=complex)
        if h.ndim != 4 or h.shape[0] != h.shape[1] or h.shape[2] != h.shape[3]:
            raise ValueError("expected a tensor of shape (k, k, n, n)")
        if check:
            defect = np.linalg.norm(h - h.transpose(1, 0, 3, 2).conj())
            if defect > tol * max(1.0, np.linalg.norm(h)):
                raise ValueError(f"matrix of forms is not Hermitian (defect {defect:.3g})")
        h.setflags(write=False)
        self.h = h

    @classmethod
    def from_entries(cls, entries: Sequence[Sequence[Form]], check: bool = True) -> "GriffithsMatrix":
        k = len(entries)
        n = entries[0][0].n
        h = np.empty((k, k, n, n), dtype=complex)
        for a in range(k):
            if len(entries[a]) != k:
                raise ValueError("matrix of forms must be square")
            for b in range(k):
                h[a, b] = coefficient_matrix(entries[a][b])
        return cls(h, check=check)

    @classmethod
    def diagonal(cls, factors: Sequence[KahlerForm]) -> "GriffithsMatrix":
        k, n = len(factors), factors[0].n
        h = np.zeros((k, k, n, n), dtype=complex)
        for a, f in enumerate(factors):
            h[a, a] = f.h
        return cls(h)

    @classmethod
    def identity(cls, k: int, n: int) -> "GriffithsMatrix":
        h = np.zeros((k, k, n, n), dtype=complex)
        for a in range(k):
            h[a, a] = np.eye(n)
        return cls(h)

    @property
    def k(self) -> int:
        return self.h.shape[0]

    @property
    def n(self) -> int:
        return self.h.shape[2]

    def entry(self, a: int, b: int) -> Form:
        return hermitian_form(self.h[a, b])

    def entries(self) -> list[list[Form]]:
        return [[self.entry(a, b) for b in range(self.k)] for a in range(self.k)]

    def nakano_matrix(self) -> np.ndarray:
        """N[(a,j),(b,l)] = h[a,b,j,l] as a Hermitian nk x nk matrix."""
        k, n = self.k, self.n
        return self.h.transpose(0, 2, 1, 3).reshape(k * n, k * n)

    def contract(self, theta) -> np.ndarray:
        """Coefficient matrix of theta M conj(theta)^T."""
        theta = np.asarray(theta, dtype=complex)
        return np.einsum("a,abjl,b->jl", theta, self.h, theta.conj())

    def permuted(self, perm: Sequence[int]) -> "GriffithsMatrix":
        perm = list(perm)
        return GriffithsMatrix(self.h[np.ix_(perm, perm)], check=False)

    def __repr__(self):
        return f"GriffithsMatrix(k={self.k}, n={self.n})"


def griffiths_to_dict(M: GriffithsMatrix) -> dict:
    return {
        "n": M.n,
        "k": M.k,
        "entries": [[form_to_dict(f) for f in row] for row in M.entries()],
    }


def griffiths_from_dict(obj) -> GriffithsMatrix:
    if not isinstance(obj, dict) or not isinstance(obj.get("entries"), list):
        raise FormParseError("griffiths: expected an object with an 'entries' list")
    n, k = obj.get("n"), obj.get("k")
    rows = obj["entries"]
    if len(rows) != k:
        raise FormParseError(f"griffiths.entries: expected {k} rows, got {len(rows)}")
    entries = []
    for a, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != k:
            raise FormParseError(f"griffiths.entries[{a}]: expected {k} forms")
        forms = []
        for b, f in enumerate(row):
            form = form_from_dict(f, where=f"griffiths.entries[{a}][{b}]")
            if (form.n, form.p, form.q) != (n, 1, 1):
                raise FormParseError(f"griffiths.entries[{a}][{b}]: expected a (1,1)-form on C^{n}")
            forms.append(form)
        entries.append(forms)
    try:
        return GriffithsMatrix.from_entries(entries)
    except ValueError as exc:
        raise FormParseError(f"griffiths: {exc}") from None


def form_determinant(M: GriffithsMatrix | Sequence[Sequence[Form]]) -> Form:
    """sum_sigma sgn(sigma) alpha_{1 sigma(1)} ^ ... ^ alpha_{k sigma(k)}.

    Entries are even-degree forms and commute, so the Leibniz sum is well
    defined; it is evaluated by Laplace expansion along rows with the minors
    memoized on the set of used columns.
    """
    entries = M.entries() if isinstance(M, GriffithsMatrix) else [list(r) for r in M]
    k = len(entries)
    if k == 0:
        raise ValueError("empty matrix")
    n = entries[0][0].n
    memo: dict[int, Form] = {}

    def minor(row: int, used: int) -> Form:
        if row == k:
            return Form.scalar(n)
        if used in memo:
            return memo[used]
        total = None
        free = [c for c in range(k) if not used >> c & 1]
        for pos, c in enumerate(free):
            term = wedge(entries[row][c], minor(row + 1, used | 1 << c))
            if pos % 2:
                term = -term
            total = term if total is None else total + term
        memo[used] = total
        return total

    return minor(0, 0)


@dataclass(frozen=True)
class PositivityCertificate:
    kind: str  # NAKANO_CERTIFIED | GRID_SAMPLED | REFUTED
    min_eigenvalue: float
    samples: int = 0
    theta: np.ndarray | None = None
    direction: np.ndarray | None = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "min_eigenvalue": self.min_eigenvalue, "samples": self.samples}
        if self.theta is not None:
            out["theta"] = _cvec(self.theta)
            out["direction"] = _cvec(self.direction)
        return out


def _cvec(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def _unit_sphere(rng: np.random.Generator, dim: int, m: int) -> np.ndarray:
    z = rng.standard_normal((m, dim)) + 1j * rng.standard_normal((m, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def griffiths_positivity(M: GriffithsMatrix, strategy: str = "nakano", m: int = 1000,
                         rng: np.random.Generator | None = None) -> PositivityCertificate:
    """Certify or refute Griffiths positivity.

    ``nakano`` certifies through the flattened nk x nk matrix (sufficient
    only) and samples when that fails; ``grid`` samples theta (coordinate
    vectors first, then ``m`` uniform points of the unit sphere).
    """
    if strategy not in ("nakano", "grid"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == "nakano":
        lam = float(np.linalg.eigvalsh(M.nakano_matrix())[0])
        if lam > 0:
            return PositivityCertificate("NAKANO_CERTIFIED", lam)
    # a failed Nakano test proves nothing; fall back to sampling
    return _grid(M, m, rng)


def _grid(M: GriffithsMatrix, m: int, rng) -> PositivityCertificate:
    rng = rng if rng is not None else np.random.default_rng(0)
    thetas = np.vstack([np.eye(M.k, dtype=complex), _unit_sphere(rng, M.k, m)])
    best = np.inf
    for theta in thetas:
        w, v = np.linalg.eigh(M.contract(theta))
        if w[0] <= 0:
            return PositivityCertificate("REFUTED", float(w[0]), len(thetas), theta, v[:, 0])
        best = min(best, float(w[0]))
    return PositivityCertificate("GRID_SAMPLED", best, len(thetas))


def griffiths_path(M: GriffithsMatrix, t: float) -> GriffithsMatrix:
    """M_t = (1-t) M + t I omega."""
    I = GriffithsMatrix.identity(M.k, M.n).h
    return GriffithsMatrix((1.0 - t) * M.h + t * I, check=False)


def griffiths_deformation(M: GriffithsMatrix) -> DeformationPath:
    """The path t -> det(M_t), ending at omega^k."""
    return DeformationPath("griffiths", M.n, M.k, lambda t: form_determinant(griffiths_path(M, t)),
                           start=form_determinant(M), end=kahler_power(M.k, M.n), data={"matrix": M})


def griffiths_block_extension(M: GriffithsMatrix, r: int) -> GriffithsMatrix:
    """diag(M, omega * I_{2r})."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    k, n = M.k, M.n
    h = np.zeros((k + 2 * r, k + 2 * r, n, n), dtype=complex)
    h[:k, :k] = M.h
    for a in range(k, k + 2 * r):
        h[a, a] = np.eye(n)
    return GriffithsMatrix(h, check=False)


def sample_griffiths(n: int, k: int, rng: np.random.Generator, condition_cap: float = 1e3,
                     diagonal: bool = False, degenerate_eps: float | None = None) -> GriffithsMatrix:
    """A Nakano-positive Hermitian matrix of (1,1)-forms.

    ``diagonal`` yields diag(omega_1, ..., omega_k) with sampled Kahler
    entries.  ``degenerate_eps`` yields the near-degenerate diagonal matrix
    with entries ``i (u_a u_a^* + eps I)`` for orthonormal u_a, whose
    determinant is within O(eps) of a decomposable form.
    """
    if degenerate_eps is not None:
        U = haar_frame(n, k, rng)
        h = np.zeros((k, k, n, n), dtype=complex)
        for a in range(k):
            h[a, a] = np.outer(U[:, a], U[:, a].conj()) + degenerate_eps * np.eye(n)
        return GriffithsMatrix(h)
    if diagonal:
        return GriffithsMatrix.diagonal([sample_kahler(n, rng, condition_cap) for _ in range(k)])
    N = sample_kahler(n * k, rng, condition_cap).h
    N = 0.5 * (N + N.conj().T)
    h = N.reshape(k, n, k, n).transpose(0, 2, 1, 3)
    return GriffithsMatrix(h)


# -- positive forms -----------------------------------------------------------

def sample_positive_form(n: int, k: int, terms: int, rng: np.random.Generator) -> Form:
    """sum_s lambda_s i^{k^2} alpha_s ^ conj(alpha_s) with random (k,0)-forms alpha_s."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if terms < 1:
        raise ValueError("terms must be positive")
    dim = comb(n, k)
    total = Form(n, k, k)
    phase = 1j ** (k * k % 4)
    for _ in range(terms):
        lam = rng.uniform(0.5, 1.5)
        alpha = Form(n, k, 0, rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
        total = total + (lam * phase) * wedge(alpha, conjugate(alpha))
    # symmetrize away rounding so the result is real to the last bit
    return 0.5 * (total + conjugate(total))


def haar_frame(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """n x k matrix with orthonormal columns, Haar distributed (Gaussian QR with phase fix)."""
    Z = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


@lru_cache(maxsize=None)
def _subset_rows(n: int, k: int):
    return [list(np.array(I) - 1) for I, _ in basis(n, k, 0)]


def restriction_scalar(Omega: Form, frame) -> complex:
    """Restriction of a (k,k)-form to span(frame) relative to the subspace volume form.

    Pulling back along w -> F w sends dz_I ^ dzb_J to
    det(F_I) conj(det(F_J)) dw ^ dwb, and the volume form is i^{k^2} dw ^ dwb.
    """
    k = Omega.p
    F = np.asarray(frame, dtype=complex)
    minors = np.array([np.linalg.det(F[rows, :]) for rows in _subset_rows(Omega.n, k)])
    C = Omega.coeffs.reshape(minors.size, minors.size)
    return complex(minors @ C @ minors.conj() / 1j ** (k * k % 4))


@dataclass(frozen=True)
class StrictPositivityResult:
    verdict: str  # SAMPLED_PASS | REFUTED
    min_value: float
    frames_checked: int
    positive_ok: bool
    frame: np.ndarray | None = None

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "min_value": self.min_value,
               "frames_checked": self.frames_checked, "positive_ok": self.positive_ok}
        if self.frame is not None:
            out["frame"] = [_cvec(col) for col in self.frame.T]
        return out


def strict_positivity_check(Omega: Form, m: int = 200, rng: np.random.Generator | None = None,
                            rtol: float = 1e-12) -> StrictPositivityResult:
    """Sample k-planes (all coordinate planes, then ``m`` Haar frames) and restrict Omega.

    A restriction with modulus at most ``rtol * ||Omega||`` refutes strict
    positivity.  ``positive_ok`` records whether every restriction was a
    nonnegative real multiple of the volume form, as it must be for a
    positive form.
    """
    if Omega.p != Omega.q:
        raise ValueError("strict positivity is defined for (k,k)-forms")
    n, k = Omega.n, Omega.p
    rng = rng if rng is not None else np.random.default_rng(0)
    frames = [np.eye(n, dtype=complex)[:, list(c)] for c in combinations(range(n), k)]
    frames += [haar_frame(n, k, rng) for _ in range(m)]
    scale = max(Omega.norm(), 1e-300)
    best, positive_ok = np.inf, True
    for F in frames:
        val = restriction_scalar(Omega, F)
        if abs(val.imag) > 1e-9 * scale or val.real < -rtol * scale:
            positive_ok = False
        if abs(val) <= rtol * scale:
            return StrictPositivityResult("REFUTED", abs(val), len(frames), positive_ok, F)
        best = min(best, val.real)
    return StrictPositivityResult("SAMPLED_PASS", float(best), len(frames), positive_ok)
