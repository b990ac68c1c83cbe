"""``monomeq`` command line.

Exit codes: 0 Equivalent/success, 1 NotEquivalent, 2 Inconclusive,
3 invariant or commutation violation, 4 usage, 5 I/O or malformed input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import (
    AmbiguousMatch,
    InvariantViolation,
    MatrixFormatError,
    NotCommuting,
    NotHermitian,
    NotUnitary,
)
from .fixtures import cycle_fixture, quad_fixture, random_monomial_instance
from .invariant_masa import build_invariant_masa, certificate_report
from .linalg_kernel import ToleranceConfig
from .matrix_io import complex_list, load_matrix, matrix_to_obj, save_matrix
from .monomial import decide_unitary_equiv
from .search import COUNTEREXAMPLE, MODES, run_search

EXIT_OK = 0
EXIT_VIOLATION = 3
EXIT_USAGE = 4
EXIT_IO = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(obj):
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _tol(args) -> ToleranceConfig:
    try:
        return ToleranceConfig.from_env(
            commute_tol=args.commute_tol, cluster_tol=args.cluster_tol, zero_tol=args.zero_tol
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_analyze(args) -> int:
    tol = _tol(args)
    A = load_matrix(args.file)
    report = decide_unitary_equiv(A, tol, kernel_retries=args.kernel_retries, seed=args.seed)
    _emit(report.to_json())
    for line in report.diagnostics:
        print(f"monomeq: {line}", file=sys.stderr)
    return report.verdict.exit_code


def cmd_masa(args) -> int:
    tol = _tol(args)
    generators = [load_matrix(p) for p in args.gen]
    U = load_matrix(args.unitary)
    if any(G.shape != U.shape for G in generators):
        raise MatrixFormatError("generators and unitary must share one dimension")
    try:
        masa = build_invariant_masa(generators, U, tol)
    except (InvariantViolation, AmbiguousMatch, NotCommuting, NotHermitian, NotUnitary) as exc:
        print(f"monomeq: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    check = certificate_report(masa.V, generators, U, tol)
    _emit({
        "V": matrix_to_obj(masa.V),
        "diag_certificates": masa.diag_certificates,
        "monomial": {
            "weights": complex_list(masa.monomial_certificate.weights),
            "perm": list(masa.monomial_certificate.perm),
            "residual": masa.monomial_residual,
        },
        "sigma": list(masa.orbits.sigma),
        "orbits": [list(o) for o in masa.orbits.orbits],
        "verified": check["ok"],
    })
    if not check["ok"]:
        print("monomeq: certificates exceed tolerance: "
              f"diag={check['diag_certificates']} residual={check['monomial_residual']:.3e}",
              file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _fixture_files(args):
    if args.name == "quad":
        fx = quad_fixture()
        expected = {
            "name": fx.name,
            "half_normal": True,
            "first_failing_k": 2,
            "verdict": "NotEquivalent",
            "commutator_k2": matrix_to_obj(fx.expected["commutator_k2"]),
        }
        return {"P": fx.P, "U": fx.U, "A": fx.A}, expected
    if args.name == "cycle":
        if args.n is None or args.n < 3:
            raise UsageError("fixture cycle needs --n >= 3")
        fx = cycle_fixture(args.n)
        expected = {
            "name": fx.name,
            "first_failing_k": args.n - 1,
            "commuting_k": fx.expected["commuting_k"],
        }
        return {"P": fx.P, "U": fx.U, "A": fx.A}, expected
    n = 6 if args.n is None else args.n
    if n < 1:
        raise UsageError("--n must be >= 1")
    inst = random_monomial_instance(n, args.seed, invertible=not args.singular)
    expected = {
        "name": f"random-monomial-{n}-{args.seed}",
        "verdict": "Equivalent",
        "weights": complex_list(inst.form.weights),
        "perm": list(inst.form.perm),
    }
    return {"P": inst.P, "U": inst.U, "A": inst.A, "W": inst.W}, expected


def cmd_fixture(args) -> int:
    matrices, expected = _fixture_files(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = [str(save_matrix(M, out / f"{name}.json")) for name, M in matrices.items()]
    path = out / "expected.json"
    path.write_text(json.dumps(expected, indent=2) + "\n", encoding="utf-8")
    written.append(str(path))
    _emit({"fixture": args.name, "files": written})
    return EXIT_OK


def cmd_search(args) -> int:
    tol = _tol(args)
    try:
        records = run_search(
            args.n, args.trials, args.max_power, args.seed, mode=args.mode, tol=tol,
            kernel_retries=args.kernel_retries, jobs=args.jobs,
        )
        flagged = total = 0
        for record in records:
            total += 1
            flagged += record.classification == COUNTEREXAMPLE
            sys.stdout.write(json.dumps(record.to_json()) + "\n")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"monomeq: {total} trials, {flagged} candidate counterexample(s)", file=sys.stderr)
    return EXIT_OK


def _add_tol_flags(p):
    p.add_argument("--commute-tol", type=float, default=None, help="relative commutator tolerance")
    p.add_argument("--cluster-tol", type=float, default=None, help="relative eigenvalue cluster gap")
    p.add_argument("--zero-tol", type=float, default=None, help="zero threshold")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="monomeq", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="decide unitary equivalence to a weighted permutation")
    p.add_argument("file")
    p.add_argument("--kernel-retries", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    _add_tol_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("masa", help="embed a U-invariant algebra into a U-invariant masa")
    p.add_argument("--gen", action="append", default=[], metavar="FILE")
    p.add_argument("--unitary", required=True, metavar="FILE")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_masa)

    p = sub.add_parser("fixture", help="export a worked example as matrix files")
    p.add_argument("name", choices=["cycle", "quad", "random-monomial"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--singular", action="store_true", help="random-monomial: allow zero weights")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("search", help="randomized evidence run for the all-powers question")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-power", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=MODES, default="mixed")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--kernel-retries", type=int, default=32)
    _add_tol_flags(p)
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"monomeq: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, MatrixFormatError) as exc:
        print(f"monomeq: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
