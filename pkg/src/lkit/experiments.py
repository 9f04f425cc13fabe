"""Seeded Monte-Carlo experiments behind the ``timorin`` and ``griffiths`` commands.

Every trial draws from its own PCG64 stream derived from (seed, trial), so
results do not depend on how many worker threads run the trials.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .cones import (
    GriffithsMatrix,
    form_determinant,
    griffiths_block_extension,
    griffiths_deformation,
    griffiths_positivity,
    griffiths_to_dict,
    sample_griffiths,
    sample_kahler,
    timorin_product,
)
from .exterior import kahler_power, serialize, wedge
from .hodge_riemann import (
    DEFAULT_DELTA,
    DEFAULT_SIGMA_TOL,
    certify_path,
    check_primitive_positivity,
)
from .operators import wedge_operator
from .paths import kahler_tuple_path
from .report import Report, trial_rng, write_atomic

__all__ = ["bidegrees", "run_timorin", "run_griffiths", "map_trials"]


def bidegrees(n: int, k_min: int = 1):
    """All (p, q, k) with p + q + k = n and k >= k_min, ordered by k then p."""
    return [(p, n - k - p, k) for k in range(k_min, n + 1) for p in range(n - k + 1)]


def map_trials(fn, trials: int, jobs: int = 1) -> list:
    if jobs <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, range(trials)))


def _min_sigma(cert) -> dict:
    return {str(r): min(s for _, s in ms) for r, ms in sorted(cert.margins.items())}


def run_timorin(n: int, trials: int, seed: int, delta: float = DEFAULT_DELTA,
                sigma_tol: float = DEFAULT_SIGMA_TOL, eig_tol: float = 1e-9,
                condition_cap: float = 1e3, jobs: int = 1) -> Report:
    """Products of sampled Kahler forms along the factor-wise path to omega^k.

    Any failure contradicts a proved statement and is flagged as a MATH_ALARM
    with the sampled factor matrices attached.
    """
    combos = bidegrees(n)

    def trial(t):
        rng = trial_rng(seed, t)
        out = []
        for p, q, k in combos:
            factors = [sample_kahler(n, rng, condition_cap) for _ in range(k)]
            Omega, path = timorin_product(factors)
            cert = certify_path(path, p, q, delta, sigma_tol)
            pos = check_primitive_positivity(Omega, p, q, eig_tol) if cert.passed else None
            alarm = not cert.passed or pos is None or not pos.positive
            rec = {
                "trial": t, "p": p, "q": q, "k": k,
                "verdict": cert.verdict,
                "min_sigma": _min_sigma(cert),
                "lambda_min": None if pos is None else pos.lambda_min,
                "outcome": "MATH_ALARM" if alarm else "PASS",
            }
            if alarm:
                rec["replay"] = {
                    "seed": seed, "trial": t,
                    "factors": [[[[z.real, z.imag] for z in row] for row in f.h] for f in factors],
                    "omega": serialize(Omega),
                    "failure": cert.to_dict(include_margins=True).get("failure"),
                }
            out.append(rec)
        return out

    records = [r for chunk in map_trials(trial, trials, jobs) for r in chunk]
    lam = [r["lambda_min"] for r in records if r["lambda_min"] is not None]
    aggregate = {
        "checks": len(records),
        "pass": sum(r["outcome"] == "PASS" for r in records),
        "alarms": sum(r["outcome"] == "MATH_ALARM" for r in records),
        "certified": sum(r["verdict"] == "CERTIFIED" for r in records),
        "sampled_pass": sum(r["verdict"] == "SAMPLED_PASS" for r in records),
        "min_lambda": min(lam) if lam else None,
        "min_sigma": min((min(r["min_sigma"].values()) for r in records), default=None),
    }
    config = {"n": n, "trials": trials, "seed": seed, "delta": delta, "sigma_tol": sigma_tol,
              "eig_tol": eig_tol, "condition_cap": condition_cap}
    return Report("timorin", config, records, aggregate)


def _extension_residuals(M: GriffithsMatrix, det, rs=(0, 1, 2)) -> dict:
    out = {}
    for r in rs:
        lhs = form_determinant(griffiths_block_extension(M, r))
        rhs = wedge(det, kahler_power(2 * r, M.n))
        if lhs.coeffs.size == 0:
            out[str(r)] = 0.0
            continue
        scale = max(rhs.norm(), lhs.norm(), 1e-300)
        out[str(r)] = float(np.linalg.norm(lhs.coeffs - rhs.coeffs) / scale)
    return out


def run_griffiths(n: int, k: int, p: int, q: int, trials: int, seed: int,
                  delta: float = DEFAULT_DELTA, sigma_tol: float = DEFAULT_SIGMA_TOL,
                  watch: float = 1e-6, diagonal: bool = False,
                  degenerate_eps: float | None = None, condition_cap: float = 1e3,
                  candidates_dir: str | None = None, jobs: int = 1) -> Report:
    """Probe whether determinants of Griffiths-positive matrices satisfy (*).

    Each trial samples a Nakano-positive M, follows det((1-t)M + t I omega)
    and records the margins.  The block extension diag(M, omega I_{2r}) is
    checked against det(M) ^ omega^{2r}.  Trials whose relative r=0 margin
    drops below ``watch`` are written to ``candidates_dir``.  Diagonal
    trials are re-run on the Kahler-factor path and must agree.
    """
    if k != n - p - q:
        raise ValueError(f"k must equal n-p-q={n - p - q}")

    def trial(t):
        rng = trial_rng(seed, t)
        M = sample_griffiths(n, k, rng, condition_cap, diagonal=diagonal, degenerate_eps=degenerate_eps)
        pos = griffiths_positivity(M, "nakano", rng=rng)
        path = griffiths_deformation(M)
        Omega = path.start
        cert = certify_path(path, p, q, delta, sigma_tol)
        sig0 = cert.margins[0][0][1]
        sig0_rel = sig0 / max(_op_norm(Omega, p, q), 1e-300)
        rec = {
            "trial": t,
            "positivity": pos.kind,
            "nakano_lambda_min": pos.min_eigenvalue,
            "verdict": cert.verdict,
            "min_sigma": _min_sigma(cert),
            "sigma_t0_r0": sig0,
            "sigma_t0_r0_rel": sig0_rel,
            "extension_residual": _extension_residuals(M, Omega),
            "candidate": bool(sig0_rel < watch or not cert.passed),
        }
        if diagonal:
            factors = [M.entry(a, a) for a in range(k)]
            ref = certify_path(kahler_tuple_path(factors), p, q, delta, sigma_tol)
            rec["timorin_verdict"] = ref.verdict
            rec["timorin_agrees"] = ref.verdict == cert.verdict
            rec["outcome"] = "MATH_ALARM" if not (ref.passed and cert.passed) else "PASS"
        if rec["candidate"] and candidates_dir is not None:
            dump = {"seed": seed, "trial": t, "p": p, "q": q, "matrix": griffiths_to_dict(M),
                    "omega": serialize(Omega), "certificate": cert.to_dict()}
            write_atomic(os.path.join(candidates_dir, f"candidate-{seed}-{t}.json"),
                         json.dumps(dump, indent=2, sort_keys=True) + "\n")
            rec["candidate_file"] = f"candidate-{seed}-{t}.json"
        return rec

    records = map_trials(trial, trials, jobs)
    aggregate = {
        "trials": len(records),
        "nakano_certified": sum(r["positivity"] == "NAKANO_CERTIFIED" for r in records),
        "pass": sum(r["verdict"] in ("CERTIFIED", "SAMPLED_PASS") for r in records),
        "refutations": sum(r["verdict"] == "FAIL" for r in records),
        "candidates": sum(r["candidate"] for r in records),
        "max_extension_residual": max(max(r["extension_residual"].values()) for r in records),
        "min_sigma_t0_r0_rel": min(r["sigma_t0_r0_rel"] for r in records),
    }
    if diagonal:
        aggregate["timorin_disagreements"] = sum(not r["timorin_agrees"] for r in records)
        aggregate["alarms"] = sum(r["outcome"] == "MATH_ALARM" for r in records)
    config = {"n": n, "k": k, "p": p, "q": q, "trials": trials, "seed": seed, "delta": delta,
              "sigma_tol": sigma_tol, "watch": watch, "diagonal": diagonal,
              "degenerate_eps": degenerate_eps, "condition_cap": condition_cap}
    return Report("griffiths", config, records, aggregate)


def _op_norm(Omega, p, q) -> float:
    A = wedge_operator(Omega, (p, q)).entries
    return float(np.linalg.norm(A, 2))
