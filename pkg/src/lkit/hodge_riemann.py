"""Decision procedures for the Hodge-Riemann condition on real (k,k)-forms.

Condition (*) for a path Omega_t from Omega to omega^k asks that
``alpha -> Omega_t ^ omega^{2r} ^ alpha`` be an isomorphism
V^{p-r,q-r} -> V^{n-q+r,n-p+r} for all t in [0,1] and 0 <= r <= min(p,q).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .cones import strict_positivity_check
from .exterior import Form, from_differentials, is_real, kahler_power, serialize, wedge
from .operators import (
    Bidegree,
    Signature,
    gram_Q,
    image,
    kernel,
    primitive_basis,
    signature,
    wedge_operator,
)
from .paths import DeformationPath, affine_path, constant_path

__all__ = [
    "HypothesisError",
    "ConstantsNotFound",
    "StarCheck",
    "HRCertificate",
    "check_star_at",
    "certify_path",
    "is_hodge_riemann",
    "hr_decompose",
    "check_primitive_positivity",
    "estimate_constants",
    "inequality_slack",
    "verify_kernel_inclusion",
    "lemma_prim_witness",
    "verify_partial_answer",
    "signature_table",
    "DEFAULT_DELTA",
    "DEFAULT_SIGMA_TOL",
]

DEFAULT_DELTA = 1 / 64
DEFAULT_SIGMA_TOL = 1e-9


class HypothesisError(ValueError):
    """A precondition of a Hodge-Riemann statement fails; ``r`` and ``t`` locate it."""

    def __init__(self, msg: str, r: int | None = None, t: float | None = None):
        super().__init__(msg)
        self.r = r
        self.t = t


class ConstantsNotFound(ArithmeticError):
    def __init__(self, msg: str, best_margin: float):
        super().__init__(msg)
        self.best_margin = best_margin


class StarCheck(NamedTuple):
    holds: bool
    sigma_min: float
    sigma_max: float = 0.0


def _check_bidegree(Omega: Form, p: int, q: int):
    n = Omega.n
    k = n - p - q
    if p < 0 or q < 0 or k < 0:
        raise ValueError(f"need p, q >= 0 and p+q <= n, got ({p},{q}) with n={n}")
    if (Omega.p, Omega.q) != (k, k):
        raise ValueError(f"Omega must have bidegree ({k},{k}) for (p,q)=({p},{q}), n={n}")


def _r_operator(Omega: Form, p: int, q: int, r: int) -> np.ndarray:
    phi = wedge(Omega, kahler_power(2 * r, Omega.n)) if r else Omega
    return wedge_operator(phi, (p - r, q - r)).entries


def _star_from_matrix(A: np.ndarray, sigma_tol: float) -> StarCheck:
    m, k = A.shape
    if m != k:
        return StarCheck(False, 0.0, 0.0)
    if m == 0:
        return StarCheck(True, float("inf"), float("inf"))
    s = np.linalg.svd(A, compute_uv=False)
    return StarCheck(bool(s[-1] > sigma_tol * s[0]), float(s[-1]), float(s[0]))


def check_star_at(Omega: Form, p: int, q: int, r: int,
                  sigma_tol: float = DEFAULT_SIGMA_TOL) -> StarCheck:
    """Is ``alpha -> Omega ^ omega^{2r} ^ alpha`` invertible on V^{p-r,q-r}?"""
    _check_bidegree(Omega, p, q)
    if not 0 <= r <= min(p, q):
        raise ValueError(f"r={r} outside 0..{min(p, q)}")
    return _star_from_matrix(_r_operator(Omega, p, q, r), sigma_tol)


def _grid(delta: float) -> np.ndarray:
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    steps = int(np.ceil(1.0 / delta - 1e-12))
    return np.arange(steps + 1) / steps


@dataclass
class HRCertificate:
    p: int
    q: int
    n: int
    path_kind: str
    delta: float
    margins: dict = field(default_factory=dict)  # r -> [(t, sigma_min), ...]
    lipschitz: dict = field(default_factory=dict)  # r -> L_r, affine paths only
    verdict: str = "SAMPLED_PASS"  # CERTIFIED | SAMPLED_PASS | FAIL | INCONCLUSIVE
    failure: tuple | None = None  # (t, r, sigma_min)

    @property
    def passed(self) -> bool:
        return self.verdict in ("CERTIFIED", "SAMPLED_PASS")

    def min_margin(self, r: int | None = None) -> float:
        rs = [r] if r is not None else list(self.margins)
        return min(s for rr in rs for _, s in self.margins[rr])

    def to_dict(self, include_margins: bool = True) -> dict:
        out = {
            "p": self.p, "q": self.q, "n": self.n,
            "path": self.path_kind,
            "delta": self.delta,
            "verdict": self.verdict,
            "min_sigma": {str(r): _finite(self.min_margin(r)) for r in sorted(self.margins)},
            "lipschitz": {str(r): L for r, L in sorted(self.lipschitz.items())},
        }
        if self.failure is not None:
            t, r, s = self.failure
            out["failure"] = {"t": t, "r": r, "sigma_min": s}
        if include_margins:
            out["margins"] = {str(r): [[t, _finite(s)] for t, s in ms]
                              for r, ms in sorted(self.margins.items())}
        return out


def _finite(x: float):
    return x if np.isfinite(x) else None


def certify_path(path: DeformationPath, p: int, q: int, delta: float = DEFAULT_DELTA,
                 sigma_tol: float = DEFAULT_SIGMA_TOL) -> HRCertificate:
    """Check condition (*) on the grid {0, delta, ..., 1} for every r.

    For affine paths the operator is affine in t, so
    ``sigma_min(A_t) >= sigma_min(A_ti) - L_r |t - t_i|`` with
    ``L_r = ||A_1 - A_0||_2``; when every grid value exceeds
    ``L_r * delta / 2`` the whole interval is covered and the verdict is
    CERTIFIED.  Other paths get at best SAMPLED_PASS.
    """
    n = path.n
    if path.k != n - p - q:
        raise ValueError(f"path has k={path.k}, expected {n - p - q}")
    grid = _grid(delta)
    step = float(grid[1] - grid[0]) if grid.size > 1 else 1.0
    cert = HRCertificate(p, q, n, path.kind, step)
    forms = [path(float(t)) for t in grid]
    rs = range(min(p, q) + 1)
    for r in rs:
        row = []
        for t, Om in zip(grid, forms):
            chk = _star_from_matrix(_r_operator(Om, p, q, r), sigma_tol)
            row.append((float(t), chk.sigma_min))
            if not chk.holds and cert.failure is None:
                cert.failure = (float(t), r, chk.sigma_min)
        cert.margins[r] = row
        if path.is_affine:
            diff = path.end - path.start
            D = _r_operator(diff, p, q, r)
            cert.lipschitz[r] = float(np.linalg.norm(D, 2)) if D.size else 0.0
    if cert.failure is not None:
        cert.verdict = "FAIL"
    elif path.is_affine and all(
            s > cert.lipschitz[r] * step / 2 for r in rs for _, s in cert.margins[r]):
        cert.verdict = "CERTIFIED"
    else:
        cert.verdict = "SAMPLED_PASS"
    return cert


def is_hodge_riemann(Omega: Form, p: int, q: int, strategy="affine",
                     delta: float = DEFAULT_DELTA,
                     sigma_tol: float = DEFAULT_SIGMA_TOL) -> HRCertificate:
    """Membership test along a chosen path; sufficient only.

    ``strategy`` is ``"affine"`` (straight line to omega^k) or a
    :class:`DeformationPath` starting at Omega.  A failure along the chosen
    path does not exclude membership and is reported as INCONCLUSIVE with the
    failure witness attached.
    """
    _check_bidegree(Omega, p, q)
    if not is_real(Omega, 1e-10 * max(1.0, Omega.norm())):
        raise ValueError("Omega is not real")
    if isinstance(strategy, DeformationPath):
        path = strategy
        if (path(0.0) - Omega).norm() > 1e-10 * max(1.0, Omega.norm()):
            raise ValueError("path does not start at Omega")
    elif strategy == "affine":
        path = affine_path(Omega)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    cert = certify_path(path, p, q, delta, sigma_tol)
    if cert.verdict == "FAIL":
        cert.verdict = "INCONCLUSIVE"
    return cert


def _require_r01(Omega: Form, p: int, q: int, sigma_tol: float):
    _check_bidegree(Omega, p, q)
    for r in range(min(1, p, q) + 1):
        chk = check_star_at(Omega, p, q, r, sigma_tol)
        if not chk.holds:
            raise HypothesisError(f"condition (*) fails at r={r} (sigma_min={chk.sigma_min:.3g})", r=r)


def hr_decompose(Omega: Form, p: int, q: int, alpha: Form,
                 sigma_tol: float = DEFAULT_SIGMA_TOL) -> tuple[Form, Form]:
    """Split ``alpha = beta + omega ^ gamma`` with beta in P^{p,q}."""
    _require_r01(Omega, p, q, sigma_tol)
    n = Omega.n
    if alpha.bidegree != Bidegree(p, q, n):
        raise ValueError(f"alpha must be a ({p},{q})-form on C^{n}")
    P = primitive_basis(Omega, p, q).basis
    L = wedge_operator(kahler_power(1, n), (p - 1, q - 1)).entries
    Z = np.hstack([P, L])
    c, *_ = np.linalg.lstsq(Z, alpha.coeffs, rcond=None)
    beta = Form(n, p, q, P @ c[:P.shape[1]])
    gamma = Form(n, p - 1, q - 1, c[P.shape[1]:])
    return beta, gamma


class Positivity(NamedTuple):
    positive: bool
    lambda_min: float
    relative_lambda_min: float


def check_primitive_positivity(Omega: Form, p: int, q: int, tol: float = 1e-9,
                               sigma_tol: float = DEFAULT_SIGMA_TOL) -> Positivity:
    """Smallest eigenvalue of Q restricted to an orthonormal basis of P^{p,q}.

    Positive iff it exceeds ``tol`` times the spectral norm of Q.
    """
    _require_r01(Omega, p, q, sigma_tol)
    H = gram_Q(Omega, p, q)
    P = primitive_basis(Omega, p, q).basis
    if P.shape[1] == 0:
        return Positivity(True, float("inf"), float("inf"))
    lam = float(np.linalg.eigvalsh(H.restrict(P))[0])
    scale = float(np.max(np.abs(H.eigenvalues())))
    rel = lam / scale if scale > 0 else lam
    return Positivity(bool(rel > tol), lam, rel)


class Constants(NamedTuple):
    c1: float
    c2: float
    psd_margin: float


def _constants_pieces(Omega: Form, p: int, q: int):
    n = Omega.n
    Hq = gram_Q(Omega, p, q).matrix.conj()  # alpha^* Hq alpha == Q(alpha, alpha)
    W = wedge_operator(wedge(Omega, kahler_power(1, n)), (p, q)).entries
    return Hq, W.conj().T @ W


def estimate_constants(Omega: Form, p: int, q: int, c1_seed: float | None = None,
                       c2_start: float = 1.0, growth: float = 2.0, cap: float = 1e14,
                       psd_tol: float = 1e-10) -> Constants:
    """Find c1, c2 with ``c1*Q + c2*W*W - I`` positive semidefinite.

    W is the matrix of ``alpha -> alpha ^ Omega ^ omega``.  c1 starts at
    ``c1_seed`` (default ``2 / lambda_min`` of Q on primitives) and c2 grows
    geometrically from ``c2_start``.
    """
    pos = check_primitive_positivity(Omega, p, q)
    if c1_seed is None:
        if not pos.positive:
            raise HypothesisError("Q is not positive on the primitive subspace")
        c1_seed = 2.0 / pos.lambda_min if np.isfinite(pos.lambda_min) else 1.0
    Hq, WW = _constants_pieces(Omega, p, q)
    eye = np.eye(Hq.shape[0])
    c2, best = c2_start, -np.inf
    while c2 <= cap:
        margin = float(np.linalg.eigvalsh(c1_seed * Hq + c2 * WW - eye)[0])
        best = max(best, margin)
        if margin >= -psd_tol:
            return Constants(float(c1_seed), float(c2), margin)
        c2 *= growth
    raise ConstantsNotFound(f"no c2 <= {cap:g} works for c1={c1_seed:g}", best)


def inequality_slack(Omega: Form, p: int, q: int, c1: float, c2: float, alphas) -> np.ndarray:
    """``c1 Q(a,a) + c2 ||a ^ Omega ^ omega||^2 - ||a||^2`` for unit-normalized columns a."""
    A = np.asarray(alphas, dtype=complex)
    A = A / np.linalg.norm(A, axis=0, keepdims=True)
    n = Omega.n
    Hq = gram_Q(Omega, p, q)
    W = wedge_operator(wedge(Omega, kahler_power(1, n)), (p, q)).entries
    qv = Hq.values(A)
    wv = np.sum(np.abs(W @ A) ** 2, axis=0) if W.size else np.zeros(A.shape[1])
    return c1 * qv + c2 * wv - np.sum(np.abs(A) ** 2, axis=0)


def _is_kahler_power(Omega: Form) -> bool:
    ref = kahler_power(Omega.p, Omega.n)
    return bool(np.linalg.norm(Omega.coeffs - ref.coeffs) <= 1e-12 * max(1.0, ref.norm()))


class KernelInclusion(NamedTuple):
    holds: bool
    max_residual: float
    residual: float
    mirror_residual: float


def _inclusion_residual(Omega: Form, a: int, b: int, rtol: float) -> float:
    """max over an orthonormal basis of ker(. ^ Omega ^ omega) in V^{a,b} of dist to omega ^ V^{a-1,b-1}."""
    n = Omega.n
    W = wedge_operator(wedge(Omega, kahler_power(1, n)), (a, b)).entries
    K = kernel(W, rtol)
    if K.shape[1] == 0:
        return 0.0
    S = image(wedge_operator(kahler_power(1, n), (a - 1, b - 1)).entries, rtol)
    R = K - S @ (S.conj().T @ K) if S.shape[1] else K
    return float(np.max(np.linalg.norm(R, axis=0)))


def verify_kernel_inclusion(Omega: Form, p: int, q: int, path: DeformationPath | None = None,
                            delta: float = 1 / 16, tol: float = 1e-8,
                            sigma_tol: float = DEFAULT_SIGMA_TOL,
                            rtol: float = 1e-9) -> KernelInclusion:
    """Forms in V^{p,q-1} (and V^{p-1,q}) killed by Omega ^ omega lie in the image of omega.

    The hypotheses are checked on a grid along ``path``: ``Omega_t ^ .``
    invertible on V^{p,q} for every grid t and ``Omega_t ^ omega^2 ^ .``
    invertible on V^{p-1,q-1} for grid t > 0.  When Omega is omega^k the
    constant path is used.
    """
    _check_bidegree(Omega, p, q)
    if path is None:
        if not _is_kahler_power(Omega):
            raise ValueError("a deformation path is required unless Omega = omega^k")
        path = constant_path(Omega)
    for t in _grid(delta):
        Om = path(float(t))
        if not _star_from_matrix(_r_operator(Om, p, q, 0), sigma_tol).holds:
            raise HypothesisError(f"Omega_t ^ . is singular on V^({p},{q}) at t={t}", r=0, t=float(t))
        if t > 0 and min(p, q) >= 1:
            if not _star_from_matrix(_r_operator(Om, p, q, 1), sigma_tol).holds:
                raise HypothesisError(f"Omega_t ^ omega^2 ^ . is singular at t={t}", r=1, t=float(t))
    res = _inclusion_residual(Omega, p, q - 1, rtol) if q >= 1 else 0.0
    mirror = _inclusion_residual(Omega, p - 1, q, rtol) if p >= 1 else 0.0
    worst = max(res, mirror)
    return KernelInclusion(worst <= tol, worst, res, mirror)


class PrimWitness(NamedTuple):
    alpha: Form
    primitive_ok: bool
    not_in_image_ok: bool
    primitive_residual: float
    image_distance: float


def lemma_prim_witness(n: int, p: int, q: int, tol: float = 1e-8) -> PrimWitness:
    """The monomial dzb_2 ^ ... ^ dzb_q ^ dz_{q+1} ^ ... ^ dz_{p+q} and its two checks.

    primitive: alpha ^ omega^{n-p-q+2} vanishes exactly.  Not in image:
    alpha ^ dzb_1 keeps relative distance above ``tol`` from omega ^ V^{p-1,q-1}.
    """
    if q < 2:
        raise ValueError("the witness needs q >= 2")
    if p < 0 or p + q > n:
        raise ValueError(f"need 0 <= p and p+q <= n, got ({p},{q}) with n={n}")
    factors = [(j, True) for j in range(2, q + 1)] + [(j, False) for j in range(q + 1, p + q + 1)]
    alpha = from_differentials(n, factors)
    killed = wedge(alpha, kahler_power(n - p - q + 2, n))
    residual = float(np.max(np.abs(killed.coeffs))) if killed.coeffs.size else 0.0
    target = wedge(alpha, from_differentials(n, [(1, True)]))
    S = image(wedge_operator(kahler_power(1, n), (p - 1, q - 1)).entries)
    v = target.coeffs
    dist = float(np.linalg.norm(v - S @ (S.conj().T @ v))) if S.shape[1] else float(np.linalg.norm(v))
    rel = dist / float(np.linalg.norm(v))
    return PrimWitness(alpha, residual == 0.0, rel > tol, residual, rel)


@dataclass
class PartialAnswerReport:
    outcome: str  # PASS | MATH_ALARM
    p: int
    q: int
    certificate: HRCertificate
    positivity: list = field(default_factory=list)
    alarm: dict | None = None

    def to_dict(self) -> dict:
        out = {"outcome": self.outcome, "p": self.p, "q": self.q,
               "certificate": self.certificate.to_dict(),
               "positivity": self.positivity}
        if self.alarm is not None:
            out["alarm"] = self.alarm
        return out


def verify_partial_answer(path: DeformationPath, p: int, q: int, delta: float = DEFAULT_DELTA,
                          sigma_tol: float = DEFAULT_SIGMA_TOL, positivity_samples: int = 32,
                          positivity_every: int = 8, seed: int = 0) -> PartialAnswerReport:
    """Strictly positive path + r=0 on the grid + min(p,q) <= 2 should give all of (*).

    Preconditions that fail raise :class:`HypothesisError`.  A violation of
    the conclusion is returned as a MATH_ALARM outcome carrying enough data to
    replay the check.
    """
    if min(p, q) > 2:
        raise ValueError("the statement covers min(p,q) <= 2 only")
    grid = _grid(delta)
    rng = np.random.default_rng(seed)
    positivity = []
    for i, t in enumerate(grid):
        if i % positivity_every and i != len(grid) - 1:
            continue
        res = strict_positivity_check(path(float(t)), positivity_samples, rng)
        positivity.append({"t": float(t), "verdict": res.verdict, "min_value": res.min_value})
        if res.verdict != "SAMPLED_PASS" or not res.positive_ok:
            raise HypothesisError(f"Omega_t is not strictly positive at t={t}", t=float(t))
    cert = certify_path(path, p, q, delta, sigma_tol)
    # failures are recorded smallest r first, so an r=0 failure shows up here
    if cert.failure is not None and cert.failure[1] == 0:
        raise HypothesisError(f"r=0 fails at t={cert.failure[0]}", r=0, t=cert.failure[0])
    if cert.failure is None:
        return PartialAnswerReport("PASS", p, q, cert, positivity)
    t, r, s = cert.failure
    alarm = {
        "t": t, "r": r, "sigma_min": s, "delta": delta, "sigma_tol": sigma_tol,
        "path_kind": path.kind,
        "omega_t": serialize(path(t)),
        "omega_0": serialize(path(0.0)),
    }
    return PartialAnswerReport("MATH_ALARM", p, q, cert, positivity, alarm)


def signature_table(Omega: Form, p: int, q: int, tol: float = 1e-8) -> list[Signature]:
    """Signature of Q built from Omega ^ omega^{2r} on V^{p-r,q-r}, for r = 0..min(p,q)."""
    _check_bidegree(Omega, p, q)
    out = []
    for r in range(min(p, q) + 1):
        phi = wedge(Omega, kahler_power(2 * r, Omega.n)) if r else Omega
        out.append(signature(gram_Q(phi, p - r, q - r), tol))
    return out
