"""``hobocirc`` command line.

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 solver error
(including an infeasible layer budget).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import METHODS, NoSolution, compile_with, run_bench, to_csv, to_markdown
from .circuit import Circuit, CircuitError, emit_qasm
from .milp import DecodeError, SolverError, SolverSpec
from .polynomial import PolynomialSyntaxError, expand_to_ising, parse_polynomial
from .verify import ANGLE_SUM, EXACTLY_ONCE, random_gammas, verify_all

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3


class InputError(Exception):
    pass


def _formats(text: str, allowed: set[str]) -> list[str]:
    out = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in out if t not in allowed]
    if bad:
        raise InputError(f"unsupported format(s) {', '.join(bad)}; choose from {', '.join(sorted(allowed))}")
    return out


def _methods(values: list[str] | None, default: tuple[str, ...]) -> tuple[str, ...]:
    if not values:
        return default
    out = []
    for v in values:
        for m in v.split(","):
            m = m.strip()
            if m not in METHODS:
                raise InputError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
            out.append(m)
    return tuple(out)


def _solver(args) -> SolverSpec:
    backend = args.solver
    if args.solver_cmd and backend == "auto":
        backend = "command"
    return SolverSpec(backend=backend, cmd=args.solver_cmd, time_limit=args.time_limit)


def _gammas(args) -> list[float]:
    if args.gamma:
        return list(args.gamma)
    return random_gammas(args.samples, args.seed)


def _read_poly(path: str, n: int | None = None):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return parse_polynomial(text, n)
    except (PolynomialSyntaxError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def cmd_compile(args) -> int:
    formats = _formats(args.format, {"qasm", "json", "lp"})
    (method,) = _methods([args.method], ("template",))
    f = _read_poly(args.file)
    if not any(m for m, _ in f.terms):
        raise InputError(f"{args.file}: no non-constant terms to compile")
    if "lp" in formats and not method.startswith("milp"):
        raise InputError("--format lp requires a milp method")
    if args.qubits is not None and args.qubits < f.n:
        raise InputError(f"--qubits {args.qubits} is below the number of variables {f.n}")
    res = compile_with(
        f,
        method,
        qubits=args.qubits,
        layers=args.layers,
        time_limit=args.time_limit,
        solver=_solver(args),
        strict_gray=args.strict_gray,
        relax=args.relax,
        emit_lp_text="lp" in formats,
    )
    h = expand_to_ising(f)
    reports = verify_all(res.circuit, h, res.mode, gammas=_gammas(args))
    passed = all(r.passed for r in reports)
    summary = {
        "instance": Path(args.file).stem,
        "method": method,
        "n": f.n,
        "q": res.circuit.q,
        "depth": res.circuit.depth,
        "gates": res.circuit.gate_count(),
        "status": res.status,
        "verified": passed,
        "reports": [r.to_dict() for r in reports],
    }
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = f"{Path(args.file).stem}.{method}"
        if "qasm" in formats:
            (out / f"{stem}.qasm").write_text(emit_qasm(res.circuit, gamma=args.qasm_gamma))
        if "json" in formats:
            (out / f"{stem}.json").write_text(res.circuit.to_json(indent=1) + "\n")
        if "lp" in formats and res.lp is not None:
            (out / f"{stem}.lp").write_text(res.lp)
        (out / f"{stem}.report.json").write_text(json.dumps(summary, indent=1) + "\n")
    elif "qasm" in formats:
        sys.stdout.write(emit_qasm(res.circuit, gamma=args.qasm_gamma))
    print(
        f"{summary['instance']}: method={method} depth={summary['depth']} q={summary['q']} "
        f"status={res.status} verified={'yes' if passed else 'NO'}",
        file=sys.stderr,
    )
    if not passed:
        for r in reports:
            if not r.passed:
                print(f"  {r.check}: {r.first_failure}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_bench(args) -> int:
    fmt = args.format if args.format in ("md", "csv") else "md"
    methods = _methods(args.method, ("template", "gray"))
    if not Path(args.dir).is_dir():
        raise InputError(f"{args.dir} is not a directory")
    try:
        records = run_bench(args.dir, methods, args.time_limit, _solver(args), args.seed)
    except FileNotFoundError as exc:
        raise InputError(str(exc)) from exc
    text = to_csv(records) if fmt == "csv" else to_markdown(records, timings=not args.no_timing)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"bench.{fmt}").write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        circuit = Circuit.from_json(Path(args.circuit).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {args.circuit}: {exc.strerror}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{args.circuit}: not a circuit file ({exc})") from exc
    f = _read_poly(args.poly, circuit.n)
    h = expand_to_ising(f)
    reports = verify_all(circuit, h, args.mode, gammas=_gammas(args))
    passed = all(r.passed for r in reports)
    print(json.dumps({"passed": passed, "reports": [r.to_dict() for r in reports]}, indent=1))
    return EXIT_OK if passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hobocirc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--time-limit", type=float, default=None, help="solver time limit in seconds")
        sp.add_argument("--solver", choices=("auto", "cbc", "highs", "command"), default="auto")
        sp.add_argument("--solver-cmd", default=None, help='command template, e.g. "mysolver {lp} {timelimit} {solout}"')
        sp.add_argument("--seed", type=int, default=2024, help="seed for sampled gamma values")
        sp.add_argument("--out-dir", default=None)

    def gammas(sp):
        sp.add_argument("--gamma", type=float, action="append", help="statevector check angle (repeatable)")
        sp.add_argument("--samples", type=int, default=3, help="number of seeded gamma samples when --gamma is absent")

    c = sub.add_parser("compile", help="compile a polynomial file into a circuit")
    c.add_argument("file")
    c.add_argument("--method", default="template", choices=METHODS)
    c.add_argument("--qubits", type=int, default=None, help="qubit budget for milp (default n)")
    c.add_argument("--layers", type=int, default=None, help="layer budget T for milp (default: template depth)")
    c.add_argument("--format", default="qasm,json", help="comma list of qasm, json, lp")
    c.add_argument("--qasm-gamma", type=float, default=1.0, help="gamma baked into QASM rz angles")
    c.add_argument("--relax", action="store_true", help="continuous a, b, d columns in the MILP")
    c.add_argument(
        "--strict-gray",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="route degree-1 monomials through the Gray ancilla too",
    )
    common(c)
    gammas(c)
    c.set_defaults(func=cmd_compile)

    b = sub.add_parser("bench", help="compile every instance in a directory and tabulate depths")
    b.add_argument("dir")
    b.add_argument("--method", action="append", help="method or comma list (repeatable); default template,gray")
    b.add_argument("--format", default="md", choices=("md", "csv"))
    b.add_argument("--no-timing", action="store_true", help="omit CPU columns (byte-stable output)")
    common(b)
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="check a circuit JSON file against a polynomial")
    v.add_argument("circuit")
    v.add_argument("poly")
    v.add_argument("--mode", choices=(ANGLE_SUM, EXACTLY_ONCE), default=ANGLE_SUM)
    v.add_argument("--seed", type=int, default=2024)
    gammas(v)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoSolution as exc:
        print(f"error: solver returned no circuit ({exc})", file=sys.stderr)
        return EXIT_SOLVER
    except (SolverError, DecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (CircuitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
