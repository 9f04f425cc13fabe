"""Command-line front end.

Exit codes: 0 success / pass, 1 input error, 2 check failed or inconclusive.
"""
from __future__ import annotations

import argparse
import os
import sys
import time

from .exterior import (
    Form,
    FormParseError,
    form_to_dict,
    is_real,
    kahler_power,
    parse,
    serialize,
    wedge,
)
from .experiments import run_griffiths, run_timorin
from .hodge_riemann import (
    DEFAULT_DELTA,
    DEFAULT_SIGMA_TOL,
    HypothesisError,
    gram_Q,
    hr_decompose,
    is_hodge_riemann,
    lemma_prim_witness,
    signature_table,
)
from .report import Report, render_text, write_atomic

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2
MAX_N_SWEEP = 5
MAX_N_SINGLE = 6


class InputError(Exception):
    pass


def _seed_default() -> int:
    raw = os.environ.get("LKIT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw, 0)
    except ValueError:
        raise InputError(f"LKIT_SEED must be an integer, got {raw!r}") from None


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--n", type=int)
    parser.add_argument("--p", type=int)
    parser.add_argument("--q", type=int)
    parser.add_argument("--k", type=int)
    parser.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="grid step in t")
    parser.add_argument("--sigma-tol", type=float, default=DEFAULT_SIGMA_TOL,
                        help="relative singular-value cutoff")
    parser.add_argument("--eig-tol", type=float, default=1e-9, help="relative eigenvalue cutoff")
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                        help="64-bit seed (falls back to $LKIT_SEED, then 0)")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--out", help="write the JSON report here (atomically)")
    parser.add_argument("--format", choices=("report", "json"), default="report",
                        help="stdout format: text summary or JSON report")
    parser.add_argument("--timings", action="store_true", help="add a timings section")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="Hodge-Riemann check of a form along the straight path")
    p.add_argument("form_file")
    _common(p)

    p = sub.add_parser("timorin", help="Monte-Carlo run over products of Kahler forms")
    _common(p)

    p = sub.add_parser("griffiths", help="probe determinants of Griffiths-positive matrices")
    p.add_argument("--watch", type=float, default=1e-6,
                   help="relative r=0 margin below which a trial is dumped as a candidate")
    p.add_argument("--candidates", help="directory for candidate dumps")
    p.add_argument("--diagonal", action="store_true", help="sample diagonal matrices only")
    p.add_argument("--degenerate-eps", type=float, default=None,
                   help="sample near-degenerate matrices at this distance")
    _common(p)

    p = sub.add_parser("signature", help="signature table of Q")
    p.add_argument("form_file", nargs="?")
    _common(p)

    p = sub.add_parser("witness", help="primitive witness form for V^{p,q-1}")
    _common(p)

    p = sub.add_parser("decompose", help="split alpha = beta + omega ^ gamma with beta primitive")
    p.add_argument("omega_file")
    p.add_argument("alpha_file")
    p.add_argument("--beta-out")
    p.add_argument("--gamma-out")
    _common(p)
    return parser


def _read_form(path: str) -> Form:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return parse(text)
    except FormParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise InputError(f"--{name} is required")


def _check_pq(n: int, p: int, q: int):
    if p < 0 or q < 0 or p + q > n:
        raise InputError(f"need p, q >= 0 and p+q <= n, got p={p}, q={q}, n={n}")


def _check_common(args):
    if not 0 < args.delta <= 1:
        raise InputError("--delta must lie in (0, 1]")
    if args.trials < 0 or args.jobs < 1:
        raise InputError("--trials must be >= 0 and --jobs >= 1")
    if args.seed is None:
        args.seed = _seed_default()


def cmd_check(args) -> tuple[Report, int]:
    Omega = _read_form(args.form_file)
    _need(args, "p", "q")
    n = Omega.n
    if n > MAX_N_SINGLE:
        raise InputError(f"n={n} exceeds the cap {MAX_N_SINGLE}")
    _check_pq(n, args.p, args.q)
    if Omega.p != Omega.q or Omega.p != n - args.p - args.q:
        raise InputError(f"form has bidegree ({Omega.p},{Omega.q}); expected "
                         f"({n - args.p - args.q},{n - args.p - args.q})")
    if not is_real(Omega, 1e-10 * max(1.0, Omega.norm())):
        raise InputError("form is not real")
    cert = is_hodge_riemann(Omega, args.p, args.q, "affine", args.delta, args.sigma_tol)
    config = {"form": form_to_dict(Omega), "p": args.p, "q": args.q,
              "delta": args.delta, "sigma_tol": args.sigma_tol, "strategy": "affine"}
    rep = Report("check", config, [cert.to_dict()], {"verdict": cert.verdict})
    return rep, EXIT_OK if cert.passed else EXIT_FAIL


def cmd_timorin(args) -> tuple[Report, int]:
    _need(args, "n")
    if not 1 <= args.n <= MAX_N_SWEEP:
        raise InputError(f"--n must lie in 1..{MAX_N_SWEEP}")
    rep = run_timorin(args.n, args.trials, args.seed, args.delta, args.sigma_tol,
                      args.eig_tol, jobs=args.jobs)
    return rep, EXIT_OK if rep.aggregate["alarms"] == 0 else EXIT_FAIL


def cmd_griffiths(args) -> tuple[Report, int]:
    _need(args, "n", "p", "q")
    n, p, q = args.n, args.p, args.q
    if not 1 <= n <= MAX_N_SWEEP:
        raise InputError(f"--n must lie in 1..{MAX_N_SWEEP}")
    _check_pq(n, p, q)
    k = args.k if args.k is not None else n - p - q
    if k != n - p - q or k < 1:
        raise InputError(f"--k must equal n-p-q={n - p - q} and be positive")
    if args.diagonal and args.degenerate_eps is not None:
        raise InputError("--diagonal and --degenerate-eps are exclusive")
    rep = run_griffiths(n, k, p, q, args.trials, args.seed, args.delta, args.sigma_tol,
                        watch=args.watch, diagonal=args.diagonal,
                        degenerate_eps=args.degenerate_eps, candidates_dir=args.candidates,
                        jobs=args.jobs)
    return rep, EXIT_OK if rep.aggregate.get("alarms", 0) == 0 else EXIT_FAIL


def cmd_signature(args) -> tuple[Report, int]:
    _need(args, "p", "q")
    p, q = args.p, args.q
    if args.form_file:
        Omega = _read_form(args.form_file)
        n = Omega.n
    else:
        _need(args, "n")
        n = args.n
        if not 0 <= n <= MAX_N_SINGLE:
            raise InputError(f"--n must lie in 0..{MAX_N_SINGLE}")
        _check_pq(n, p, q)
        Omega = kahler_power(n - p - q, n)
    _check_pq(n, p, q)
    if (Omega.p, Omega.q) != (n - p - q, n - p - q):
        raise InputError(f"form must have bidegree ({n - p - q},{n - p - q})")
    try:
        table = signature_table(Omega, p, q, args.eig_tol)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    records = [{"r": r, "signature": list(s), "dim": sum(s)} for r, s in enumerate(table)]
    config = {"n": n, "p": p, "q": q, "form": form_to_dict(Omega), "eig_tol": args.eig_tol}
    return Report("signature", config, records, {"signature": list(table[0])}), EXIT_OK


def cmd_witness(args) -> tuple[Report, int]:
    _need(args, "n", "p", "q")
    n, p, q = args.n, args.p, args.q
    if q < 2 or p < 0 or p + q > n:
        raise InputError(f"witness needs q >= 2, p >= 0, p+q <= n; got n={n}, p={p}, q={q}")
    w = lemma_prim_witness(n, p, q)
    rec = {"alpha": form_to_dict(w.alpha), "primitive_ok": w.primitive_ok,
           "not_in_image_ok": w.not_in_image_ok, "primitive_residual": w.primitive_residual,
           "image_distance": w.image_distance}
    ok = w.primitive_ok and w.not_in_image_ok
    return Report("witness", {"n": n, "p": p, "q": q}, [rec], {"ok": ok}), EXIT_OK if ok else EXIT_FAIL


def cmd_decompose(args) -> tuple[Report, int]:
    Omega = _read_form(args.omega_file)
    alpha = _read_form(args.alpha_file)
    if Omega.n != alpha.n:
        raise InputError("Omega and alpha live on different spaces")
    n, p, q = alpha.n, alpha.p, alpha.q
    if (args.p, args.q) != (None, None) and (args.p, args.q) != (p, q):
        raise InputError(f"alpha has bidegree ({p},{q}), not ({args.p},{args.q})")
    _check_pq(n, p, q)
    if (Omega.p, Omega.q) != (n - p - q, n - p - q):
        raise InputError(f"Omega must have bidegree ({n - p - q},{n - p - q})")
    if not is_real(Omega, 1e-10 * max(1.0, Omega.norm())):
        raise InputError("Omega is not real")
    config = {"n": n, "p": p, "q": q, "omega": form_to_dict(Omega), "alpha": form_to_dict(alpha)}
    try:
        beta, gamma = hr_decompose(Omega, p, q, alpha, args.sigma_tol)
    except HypothesisError as exc:
        return Report("decompose", config, [{"error": str(exc), "failing_r": exc.r}],
                      {"ok": False}), EXIT_FAIL
    beta, gamma = beta.normalized(), gamma.normalized()
    omega = kahler_power(1, n)
    residual = (alpha - beta - wedge(omega, gamma)).norm() / max(alpha.norm(), 1e-300)
    defect = abs(gram_Q(Omega, p, q)(beta, wedge(omega, gamma)))
    rec = {"beta": form_to_dict(beta), "gamma": form_to_dict(gamma),
           "reconstruction_residual": residual,
           "primitivity_residual": wedge(wedge(beta, Omega), omega).norm(),
           "q_orthogonality_defect": defect}
    for path, form in ((args.beta_out, beta), (args.gamma_out, gamma)):
        if path:
            write_atomic(path, serialize(form, indent=2) + "\n")
    return Report("decompose", config, [rec], {"ok": True}), EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "timorin": cmd_timorin,
    "griffiths": cmd_griffiths,
    "signature": cmd_signature,
    "witness": cmd_witness,
    "decompose": cmd_decompose,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        _check_common(args)
        start = time.perf_counter()
        report, code = COMMANDS[args.command](args)
        if args.timings:
            report.timings = {"wall_seconds": time.perf_counter() - start, "jobs": args.jobs}
    except InputError as exc:
        print(f"lkit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = report.to_json()
    if args.out:
        write_atomic(args.out, text)
    sys.stdout.write(text if args.format == "json" else render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
