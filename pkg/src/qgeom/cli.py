"""Command line entry point: ``qgeom verify|evolve|frobenius|gns``.

Exit codes: 0 pass, 1 violation or undecided verdict, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import os
import sys
import time

import numpy as np

from qgeom import endo, frobenius, hermitian, io, projective, suites
from qgeom.errors import InputError, QGeomError, UndecidedError
from qgeom.numerics.ode import DEFAULT_TOL

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INPUT)


def _dims(text: str) -> list[int]:
    try:
        dims = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid dimension list {text!r}") from None
    if not dims or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError("dimensions must be positive integers")
    return dims


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QGEOM_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"QGEOM_SEED must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qgeom", description="Geometric quantum mechanics verification toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="random seed (falls back to $QGEOM_SEED, then 0)")
        p.add_argument("--output", default=None, help="write to this file instead of stdout")

    v = sub.add_parser("verify", help="run property suites")
    v.add_argument("--suite", required=True, choices=suites.SUITES + ("all",))
    v.add_argument("--dims", type=_dims, default=list(suites.DEFAULT_DIMS))
    v.add_argument("--samples", type=int, default=20)
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--timing", action="store_true", help="include wall_time (makes output non-deterministic)")
    common(v)

    e = sub.add_parser("evolve", help="integrate the Schrödinger equation and write a CSV trajectory")
    e.add_argument("--hamiltonian", required=True)
    e.add_argument("--state", required=True)
    e.add_argument("--T", type=float, required=True)
    e.add_argument("--tol", type=float, default=DEFAULT_TOL)
    e.add_argument("--bloch", action="store_true", help="append Bloch columns u1,u2,u3 (n = 2)")
    common(e)

    f = sub.add_parser("frobenius", help="associativity, flatness and ideal closure of a structure field")
    f.add_argument("input")
    f.add_argument("--degree-bound", type=int, default=2)
    common(f)

    g = sub.add_parser("gns", help="GNS report for a density matrix")
    g.add_argument("rho")
    g.add_argument("--samples", type=int, default=20)
    common(g)
    return parser


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def cmd_verify(args) -> int:
    seed = _seed(args)
    start = time.perf_counter()
    report = suites.run_suite(args.suite, args.dims, seed, args.samples)
    report.wall_time = time.perf_counter() - start
    if args.format == "json":
        text = _json(report.to_dict(timing=args.timing))
    else:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "status", "residual", "tolerance", "bound"])
        for c in report.to_dict()["cases"]:
            res = "" if c["residual"] is None else f"{c['residual']:.17g}"
            w.writerow([c["id"], c["status"], res, f"{c['tolerance']:.17g}", c["bound"]])
        text = buf.getvalue()
    _emit(text, args.output)
    return EXIT_OK if report.status == "pass" else EXIT_FAIL


def cmd_evolve(args) -> int:
    if args.T < 0:
        raise InputError("--T must be non-negative")
    H = io.load_matrix(args.hamiltonian, require="hermitean")
    psi = io.load_vector(args.state)
    n = H.shape[0]
    if len(psi) != n:
        raise InputError(f"state has {len(psi)} components, Hamiltonian is {n}×{n}")
    if args.bloch and n != 2:
        raise InputError("--bloch needs a two-level system")
    traj = hermitian.schrodinger_evolve(H, psi, args.T, args.tol)
    header = ["t"] + [f"re{k + 1}" for k in range(n)] + [f"im{k + 1}" for k in range(n)]
    if args.bloch:
        header += ["u1", "u2", "u3"]
    buf = _io.StringIO()
    buf.write(",".join(header) + "\n")
    for t, p in zip(traj.times, traj.states):
        row = [t, *p]
        if args.bloch:
            row += list(projective.bloch_map(hermitian.to_complex(p)).u)
        buf.write(",".join(f"{float(x):.17g}" for x in row) + "\n")
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_frobenius(args) -> int:
    sf = io.load_structure_field(args.input)
    report = frobenius.frobenius_report(sf, args.degree_bound)
    _emit(_json(report), args.output)
    return EXIT_FAIL if report["ideal_closed"] == "undecided" else EXIT_OK


def cmd_gns(args) -> int:
    rho = io.load_matrix(args.rho, require="density")
    rng = np.random.default_rng(_seed(args))
    report = endo.gns_report(rho, rng, args.samples)
    _emit(_json(report), args.output)
    return EXIT_OK if report["defect"] <= 1e-10 else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "evolve": cmd_evolve, "frobenius": cmd_frobenius, "gns": cmd_gns}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InputError, ValueError) as exc:
        print(f"qgeom: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UndecidedError as exc:
        print(f"qgeom: undecided: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_FAIL
    except QGeomError as exc:
        print(f"qgeom: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
