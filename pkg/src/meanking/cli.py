"""Command line front end.

Exit codes: 0 when every check passes, 1 when a verification or the
success criterion fails, 2 for usage and input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import kernels
from .designs import oa_from_text, oa_mols, oa_to_text, oa_trivial, oa_verify, oa_verify_rows, read_oa_text
from .errors import MeanKingError, VerificationError
from .linalg import DEFAULT_TOL
from .mub import mub_auto, mub_from_json, mub_prime_power, mub_standard_fourier, mub_to_json, mub_verify
from .protocol import (
    alice_basis_formula,
    alice_basis_general,
    alice_basis_trivial_example,
    build_states,
    check_alice_basis,
    check_decomposition,
    check_povm,
    check_states,
    h_from_oa,
    i_prime_vectors,
    overlap_matrix,
    povm_compress,
    simulate_rounds,
    success_exact,
    verify_h,
)
from .report import VerificationReport

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MeanKingError(f"cannot read {path}: {exc.strerror}") from None


def load_mub(path: str):
    try:
        obj = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise MeanKingError(f"{path}: malformed JSON ({exc.msg})") from None
    return mub_from_json(obj)


def make_mub(method: str, d: int | None, k: int | None, path: str | None = None):
    if method == "file":
        if not path:
            raise MeanKingError("--mub file requires --mub-in PATH")
        m = load_mub(path)
    else:
        if d is None:
            raise MeanKingError("--d is required")
        if method == "auto":
            return mub_auto(d, k)
        m = mub_standard_fourier(d) if method == "fourier-pair" else mub_prime_power(d)
    if k is not None and k != m.k:
        m = m.truncate(k)
    return m


def make_oa(method: str, d: int | None, k: int | None, path: str | None = None):
    if method == "file":
        if not path:
            raise MeanKingError("--oa file requires an input path")
        return oa_from_text(_read(path))
    if d is None:
        raise MeanKingError("--d is required")
    if method == "trivial":
        if k is None:
            raise MeanKingError("--k is required for the trivial array")
        return oa_trivial(k, d)
    t = oa_mols(d)
    if k is not None and k != t.k:
        if not 2 <= k <= t.k:
            raise MeanKingError(f"the Latin-square array for d={d} has {t.k} columns, cannot take {k}")
        t = t.columns(range(k))
    return t


def cmd_mub(args) -> int:
    if args.action == "gen":
        m = make_mub(args.method, args.d, args.k)
        _emit(json.dumps(mub_to_json(m)) + "\n", args.out)
        rep = mub_verify(m, args.tol)
        print(rep, file=sys.stderr)
        return EXIT_OK if rep.passed else EXIT_FAIL
    m = load_mub(args.input)
    rep = mub_verify(m, args.tol)
    print(rep)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_oa(args) -> int:
    if args.action == "gen":
        t = make_oa(args.method, args.d, args.k)
        _emit(oa_to_text(t), args.out)
        rep = oa_verify(t)
        print(rep, file=sys.stderr)
        return EXIT_OK if rep.passed else EXIT_FAIL
    rep = oa_verify_rows(*read_oa_text(_read(args.input)))
    print(rep)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _is_all_tuples(oa) -> bool:
    d, k = oa.d, oa.k
    if oa.n != d ** (k - 2):
        return False
    I = np.arange(d ** k)
    return np.array_equal(oa.rows, np.stack([(I // d ** A) % d for A in range(k)], axis=1))


def run_protocol(args) -> tuple[dict, bool]:
    """Assemble an instance from the CLI config and run every check; returns (report, passed)."""
    tol = args.tol
    mubs = make_mub(args.mub, args.d, args.k, args.mub_in)
    oa = make_oa(args.oa, args.d if args.d is not None else mubs.d, args.k if args.k is not None else mubs.k,
                 args.oa_in or args.input)
    if args.d is not None and (mubs.d != args.d or oa.d != args.d):
        raise MeanKingError(f"--d {args.d} disagrees with the inputs (MUB d={mubs.d}, OA d={oa.d})")
    if mubs.k != oa.k or mubs.d != oa.d:
        raise MeanKingError(f"MUB set (d={mubs.d}, k={mubs.k}) and OA (d={oa.d}, k={oa.k}) are incompatible")
    if args.n is not None and args.n != oa.n:
        raise MeanKingError(f"--n {args.n} disagrees with the array index n={oa.n}")

    checks: list[VerificationReport] = []
    report = {
        "parameters": {"d": mubs.d, "k": mubs.k, "n": oa.n, "d_ancilla": oa.n * oa.d,
                       "oa": args.oa, "mub": args.mub, "mode": args.mode, "tol": tol},
        "backend": kernels.BACKEND,
        "checks": checks,
    }

    def finish():
        report["checks"] = [c.to_dict() for c in checks]
        return report, all(c.passed for c in checks)

    checks.append(mub_verify(mubs, tol))
    checks.append(oa_verify(oa))
    if not all(c.passed for c in checks):
        return finish()
    try:
        inst = build_states(mubs, oa, tol)
        checks.extend(check_states(inst, tol))
        checks.extend(check_decomposition(inst, tol))
        h = h_from_oa(oa)
        checks.append(verify_h(h, oa.rows, tol))
        basis = alice_basis_general(inst, h, tol)
        inst = inst.with_basis(basis)
        checks.extend(check_alice_basis(inst, basis, h, tol))
        formula = alice_basis_formula(inst, general=basis, tol=tol)
        res = float(np.max(np.abs(formula - basis)))
        checks.append(VerificationReport("formula_matches_general", res <= tol, res, tol))
        if inst.e == 0:
            res = float(np.max(np.abs(basis - i_prime_vectors(inst) / np.sqrt(oa.n))))
            checks.append(VerificationReport("basis_equals_I_prime", res <= tol, res, tol))
        if _is_all_tuples(oa):
            closed = alice_basis_trivial_example(inst, tol)
            res = float(np.max(np.abs(overlap_matrix(inst, closed) - overlap_matrix(inst))))
            checks.append(VerificationReport("closed_form_overlaps_match", res <= tol, res, tol))
        checks.extend(check_povm(povm_compress(inst), tol))
    except VerificationError as exc:
        checks.append(exc.report)
        return finish()

    exact = success_exact(inst)
    report["exact"] = exact.to_dict()
    worst = exact.worst
    checks.append(VerificationReport("exact_success", worst >= 1 - tol, max(0.0, 1 - worst), tol))
    if args.mode == "sample":
        sim = simulate_rounds(inst, args.rounds, args.seed)
        report["sampled"] = sim.to_dict()
        miss = 1 - sim.overall
        checks.append(VerificationReport("sampled_success", miss <= tol, miss, tol,
                                         data={"successes": int(sim.wins.sum()), "rounds": args.rounds}))
        worst = min(worst, sim.worst)
    report["worst_case_success"] = worst
    return finish()


def cmd_run(args) -> int:
    if args.mode == "sample" and args.rounds < 1:
        raise MeanKingError("--rounds must be at least 1 in sample mode")
    started = time.perf_counter()
    report, passed = run_protocol(args)
    report["passed"] = passed
    report["timing"] = {
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "wall_time_s": round(time.perf_counter() - started, 6),
    }
    for c in report["checks"]:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"[{status}] {c['name']}: residual={c['residual']:.3e}")
    if "worst_case_success" in report:
        print(f"worst-case success: {report['worst_case_success']:.12f}")
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8", newline="\n")
    return EXIT_OK if passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meanking", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p_mub = sub.add_parser("mub", help="generate or verify mutually unbiased bases")
    p_mub.add_argument("action", choices=["gen", "verify"])
    p_mub.add_argument("--d", type=int)
    p_mub.add_argument("--k", type=int)
    p_mub.add_argument("--method", choices=["auto", "fourier-pair", "prime-power"], default="auto")
    p_mub.add_argument("--in", dest="input")
    p_mub.add_argument("--out")
    common(p_mub)

    p_oa = sub.add_parser("oa", help="generate or verify orthogonal arrays")
    p_oa.add_argument("action", choices=["gen", "verify"])
    p_oa.add_argument("--d", type=int)
    p_oa.add_argument("--k", type=int)
    p_oa.add_argument("--method", choices=["trivial", "mols"], default="mols")
    p_oa.add_argument("--in", dest="input")
    p_oa.add_argument("--out")
    common(p_oa)

    p_run = sub.add_parser("run", help="assemble a protocol instance and certify it")
    p_run.add_argument("--d", type=int)
    p_run.add_argument("--k", type=int)
    p_run.add_argument("--n", type=int)
    p_run.add_argument("--oa", choices=["trivial", "mols", "file"], default="mols")
    p_run.add_argument("--mub", choices=["auto", "fourier-pair", "prime-power", "file"], default="auto")
    p_run.add_argument("--in", dest="input", help="OA text file for --oa file")
    p_run.add_argument("--oa-in", help="OA text file for --oa file (same as --in)")
    p_run.add_argument("--mub-in", help="MUB JSON file for --mub file")
    p_run.add_argument("--mode", choices=["exact", "sample"], default="exact")
    p_run.add_argument("--rounds", type=int, default=10_000)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--out", help="write the JSON report here")
    common(p_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("mub", "oa") and args.action == "verify" and not args.input:
        parser.error("verify requires --in PATH")
    handler = {"mub": cmd_mub, "oa": cmd_oa, "run": cmd_run}[args.command]
    try:
        return handler(args)
    except MeanKingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
