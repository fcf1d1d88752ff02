"""Compile with each backend, verify, and tabulate depths."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from .circuit import Circuit
from .graycode import compile_gray
from .milp import (
    FEASIBLE,
    INFEASIBLE,
    OPTIMAL,
    CdpConfig,
    DecodeError,
    SolverError,
    SolverSpec,
    build_model,
    decode_solution,
    solve,
)
from .polynomial import HoboPolynomial, expand_to_ising, parse_polynomial
from .template import compile_greedy, merge_duplicates
from .verify import ANGLE_SUM, EXACTLY_ONCE, random_gammas, verify_all

METHODS = ("milp", "milp-down", "template", "gray")
TABLE_COLUMNS = ("gray", "milp", "milp-down", "template")
HEADERS = {"gray": "Gray code", "milp": "(CDP)", "milp-down": "Simpl.ed (CDP)", "template": "Templates"}


class NoSolution(RuntimeError):
    """The solver finished without a circuit (infeasible or no incumbent)."""

    def __init__(self, status: str, message: str = ""):
        super().__init__(f"{status}: {message}" if message else status)
        self.status = status


@dataclass
class CompileResult:
    circuit: Circuit
    mode: str  # verification mode the circuit is held to
    status: str = OPTIMAL
    objective: float | None = None
    lp: str | None = None


def milp_warm_start(f: HoboPolynomial) -> Circuit:
    """Greedy template circuit with duplicate rotations merged (exactly-once)."""
    return merge_duplicates(compile_greedy(f), expand_to_ising(f))


def compile_with(
    f: HoboPolynomial,
    method: str,
    *,
    qubits: int | None = None,
    layers: int | None = None,
    time_limit: float | None = None,
    solver: SolverSpec | None = None,
    strict_gray: bool = True,
    relax: bool = False,
    emit_lp_text: bool = False,
) -> CompileResult:
    if not any(m for m, _ in f.terms):
        raise ValueError("polynomial has no non-constant terms")
    if method == "template":
        return CompileResult(compile_greedy(f), ANGLE_SUM)
    if method == "gray":
        return CompileResult(compile_gray(f, strict=strict_gray), ANGLE_SUM)
    if method not in ("milp", "milp-down"):
        raise ValueError(f"unknown method {method!r}")
    h = expand_to_ising(f)
    q = qubits if qubits is not None else f.n
    warm = milp_warm_start(f)
    T = layers if layers is not None else warm.depth
    use_warm = warm.depth <= T and warm.q <= q
    if use_warm and warm.q < q:
        warm = Circuit(q, warm.n, warm.layers)
    cfg = CdpConfig(
        q=q,
        T=T,
        downward_only=method == "milp-down",
        relax_abd=relax,
        warm_start=warm if use_warm else None,
        time_limit=time_limit,
    )
    model = build_model(h, cfg)
    lp = None
    if emit_lp_text:
        from .milp import emit_lp  # noqa: PLC0415

        lp = emit_lp(model)
    sol = solve(model, solver or SolverSpec(time_limit=time_limit))
    if sol.status == INFEASIBLE or not sol.usable:
        raise NoSolution(sol.status, sol.message)
    circuit = decode_solution(model, sol)
    return CompileResult(circuit, EXACTLY_ONCE, sol.status, sol.objective, lp)


@dataclass
class BenchRecord:
    instance: str
    n: int
    monomials: int
    degree: int
    method: str
    depth: int | None
    seconds: float
    verified: bool
    status: str = OPTIMAL

    @property
    def cell(self) -> str:
        return str(self.depth) if self.verified and self.depth is not None else "-"


def bench_instance(
    name: str,
    f: HoboPolynomial,
    method: str,
    time_limit: float | None = None,
    solver: SolverSpec | None = None,
    seed: int = 2024,
) -> BenchRecord:
    base = dict(instance=name, n=f.n, monomials=len([m for m, _ in f.terms if m]), degree=f.degree, method=method)
    t0 = time.perf_counter()
    try:
        res = compile_with(f, method, time_limit=time_limit, solver=solver)
    except (NoSolution, SolverError, DecodeError, ValueError) as exc:
        status = getattr(exc, "status", "error")
        return BenchRecord(**base, depth=None, seconds=time.perf_counter() - t0, verified=False, status=status)
    seconds = time.perf_counter() - t0
    h = expand_to_ising(f)
    reports = verify_all(res.circuit, h, res.mode, gammas=random_gammas(3, seed))
    ok = all(r.passed for r in reports)
    status = res.status if res.status in (OPTIMAL, FEASIBLE) else "error"
    return BenchRecord(**base, depth=res.circuit.depth, seconds=seconds, verified=ok, status=status)


def _order(path: Path) -> tuple:
    stem = path.stem
    family = 0 if stem.startswith("qubo") else 1
    digits = "".join(ch for ch in stem if ch.isdigit())
    degree = int(digits[0]) if digits and family else 0
    return (family, degree, stem.startswith("poly"), stem)


def run_bench(
    directory: str | Path,
    methods: tuple[str, ...] = ("template", "gray"),
    time_limit: float | None = None,
    solver: SolverSpec | None = None,
    seed: int = 2024,
) -> list[BenchRecord]:
    files = sorted(Path(directory).glob("*.hobo"), key=_order)
    if not files:
        raise FileNotFoundError(f"no .hobo instances in {directory}")
    records = []
    for path in files:
        f = parse_polynomial(path.read_text())
        if not any(m for m, _ in f.terms):
            continue
        for method in methods:
            records.append(bench_instance(path.stem, f, method, time_limit, solver, seed))
    return records


def to_markdown(records: list[BenchRecord], timings: bool = True) -> str:
    methods = [m for m in TABLE_COLUMNS if any(r.method == m for r in records)]
    rows: dict[str, dict] = {}
    for r in records:
        row = rows.setdefault(r.instance, {"n": r.n, "P": r.monomials, "D": r.degree})
        row[r.method] = r
    head = ["Instance", "n", "\\|P\\|", "D"]
    for m in methods:
        head += [f"{HEADERS[m]} depth"] + ([f"{HEADERS[m]} CPU [s]"] if timings else [])
    lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
    for name, row in rows.items():
        cells = [name, str(row["n"]), str(row["P"]), str(row["D"])]
        for m in methods:
            r = row.get(m)
            if r is None:
                cells += ["", ""] if timings else [""]
            else:
                cells.append(r.cell)
                if timings:
                    cells.append(f"{r.seconds:.2f}" if r.verified else "-")
        lines.append("| " + " | ".join(cells) + " |")
    lines.append("")
    lines.append("Qiskit columns are external to this tool and not reproduced.")
    return "\n".join(lines) + "\n"


def to_csv(records: list[BenchRecord]) -> str:
    buf = io.StringIO()
    fields = list(asdict(records[0]).keys()) if records else ["instance"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in records:
        row = asdict(r)
        row["seconds"] = f"{r.seconds:.4f}"
        w.writerow(row)
    return buf.getvalue()
