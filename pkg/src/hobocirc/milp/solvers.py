"""Solver boundary: LP file out, solution file in.

Backends:

``cbc``
    COIN-OR CBC run as a subprocess on the emitted LP file. The executable
    is taken from ``$HOBOCIRC_CBC``, then ``cbc`` on PATH, then the copy
    bundled with PuLP if that package is installed.
``command``
    Any executable described by a template such as
    ``"mysolver {lp} {timelimit} {solout}"`` (``{start}`` expands to the
    warm-start sidecar). The solution file holds ``name value`` lines;
    ``#`` starts a comment and a ``# status <word>`` line sets the status
    (optimal, feasible, infeasible). ``$HOBOCIRC_SOLVER_CMD`` provides a
    default template.
``highs``
    SciPy's HiGHS MILP interface, fed by reading the LP text back in.

Exit-status mapping for subprocess backends: exit code 0 means "read the
solution file"; any other code is a crash. ``$HOBOCIRC_TIME_LIMIT``
overrides the time limit of every solve.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .lpformat import LpProblem, emit_lp, read_lp, write_start
from .model import CdpModel

OPTIMAL = "optimal"
FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
ERROR = "error"
STATUSES = (OPTIMAL, FEASIBLE, INFEASIBLE, ERROR)


class SolverError(RuntimeError):
    pass


class SolverNotFound(SolverError):
    pass


class SolverCrashed(SolverError):
    pass


class SolutionParseError(SolverError):
    pass


@dataclass(frozen=True)
class SolverSpec:
    backend: str = "auto"  # auto, cbc, command, highs
    cmd: str | None = None
    time_limit: float | None = None
    workdir: str | None = None  # keep LP/solution files here instead of a temp dir


@dataclass
class SolutionVector:
    status: str
    objective: float | None = None
    values: dict[str, float] = field(default_factory=dict)
    backend: str = ""
    seconds: float = 0.0
    message: str = ""
    from_start: bool = False

    @property
    def usable(self) -> bool:
        return self.status in (OPTIMAL, FEASIBLE) and bool(self.values)


def find_cbc() -> str | None:
    env = os.environ.get("HOBOCIRC_CBC")
    if env:
        return env
    path = shutil.which("cbc")
    if path:
        return path
    try:
        from pulp.apis import coin_api  # noqa: PLC0415
    except ImportError:
        return None
    cand = getattr(coin_api, "pulp_cbc_path", None)
    return cand if cand and os.path.exists(cand) else None


def _time_limit(model: CdpModel, spec: SolverSpec) -> float | None:
    env = os.environ.get("HOBOCIRC_TIME_LIMIT")
    if env:
        return float(env)
    return spec.time_limit if spec.time_limit is not None else model.cfg.time_limit


def solve(model: CdpModel, spec: SolverSpec | None = None) -> SolutionVector:
    spec = spec or SolverSpec()
    backend = spec.backend
    if backend == "auto":
        if spec.cmd or os.environ.get("HOBOCIRC_SOLVER_CMD"):
            backend = "command"
        else:
            backend = "cbc" if find_cbc() else "highs"
    limit = _time_limit(model, spec)
    t0 = time.perf_counter()
    if backend == "highs":
        sol = _solve_highs(model, limit)
    elif backend in ("cbc", "command"):
        with _workdir(spec.workdir) as wd:
            lp = wd / "model.lp"
            lp.write_text(emit_lp(model))
            start = write_start(model.start, wd / "start.txt") if model.start else None
            out = wd / "solution.txt"
            if backend == "cbc":
                sol = _solve_cbc(model, lp, out, start, limit)
            else:
                template = spec.cmd or os.environ.get("HOBOCIRC_SOLVER_CMD")
                if not template:
                    raise SolverNotFound("command backend needs a command template")
                sol = _solve_command(model, template, lp, out, start, limit)
    else:
        raise ValueError(f"unknown solver backend {backend!r}")
    sol.backend = backend
    sol.seconds = time.perf_counter() - t0
    if sol.status in (OPTIMAL, FEASIBLE):
        _screen(model, sol)
    if sol.values and sol.objective is None:
        sol.objective = model.objective_value(sol.values)
    return sol


def _screen(model: CdpModel, sol: SolutionVector) -> None:
    """Reject assignments that are not integer-feasible (e.g. a stopped LP relaxation).

    A solver stopped before finding an incumbent may still write its last
    relaxation values. Those are replaced by the warm start, which is what
    the solver would have returned had it kept it; without one the result
    becomes an error.
    """
    bad = model.violated(sol.values) if sol.values else ["no values"]
    if not bad:
        return
    if model.start is not None and not model.violated(model.start):
        sol.status = FEASIBLE
        sol.values = dict(model.start)
        sol.objective = model.objective_value(sol.values)
        sol.message = f"no incumbent beyond the warm start ({sol.message})"
        sol.from_start = True
        return
    sol.status = ERROR
    sol.message = f"solver output is not a feasible assignment ({bad[0]}): {sol.message}"
    sol.values = {}
    sol.objective = None


class _workdir:
    def __init__(self, keep: str | None):
        self.keep = keep
        self._tmp = None

    def __enter__(self) -> Path:
        if self.keep:
            p = Path(self.keep)
            p.mkdir(parents=True, exist_ok=True)
            return p
        self._tmp = tempfile.TemporaryDirectory(prefix="hobocirc-")
        return Path(self._tmp.name)

    def __exit__(self, *exc):
        if self._tmp is not None:
            self._tmp.cleanup()


def _run(argv: list[str], limit: float | None) -> subprocess.CompletedProcess:
    # generous wall-clock guard on top of the solver's own limit
    guard = None if limit is None else 2 * limit + 60
    try:
        return subprocess.run(argv, capture_output=True, text=True, timeout=guard)
    except FileNotFoundError as exc:
        raise SolverNotFound(f"solver executable not found: {argv[0]}") from exc
    except PermissionError as exc:
        raise SolverNotFound(f"solver executable not runnable: {argv[0]}") from exc
    except subprocess.TimeoutExpired as exc:
        raise SolverCrashed(f"solver ignored its time limit and was killed after {guard:.0f}s") from exc


# -- CBC -------------------------------------------------------------------------


def _write_cbc_start(model: CdpModel, path: Path) -> Path:
    # CBC reads mipstart files in its own solution layout: a header line, then "index name value"
    lines = ["Stopped on iterations - objective value 0"]
    for idx, name in enumerate(model.columns):
        lines.append(f"{idx} {name} {model.start.get(name, 0.0):g}")
    path.write_text("\n".join(lines) + "\n")
    return path


def _solve_cbc(model: CdpModel, lp: Path, out: Path, start: Path | None, limit: float | None) -> SolutionVector:
    exe = find_cbc()
    if exe is None:
        raise SolverNotFound("CBC not found (set HOBOCIRC_CBC or install the 'cbc' extra)")
    argv = [exe, str(lp)]
    if limit is not None:
        argv += ["sec", f"{limit:g}"]
    if start is not None:
        argv += ["mips", str(_write_cbc_start(model, lp.with_name("start.mst")))]
    argv += ["solve", "solu", str(out)]
    proc = _run(argv, limit)
    if proc.returncode != 0:
        raise SolverCrashed(f"cbc exited with status {proc.returncode}: {proc.stderr.strip()[-300:]}")
    if not out.exists():
        raise SolutionParseError(f"cbc wrote no solution file; log tail: {proc.stdout.strip()[-300:]}")
    return parse_cbc_solution(out.read_text())


def parse_cbc_solution(text: str) -> SolutionVector:
    lines = text.splitlines()
    if not lines:
        raise SolutionParseError("empty CBC solution file")
    head = lines[0].strip().lower()
    objective = None
    if "objective value" in head:
        try:
            objective = float(head.rsplit("objective value", 1)[1].split()[0])
        except (IndexError, ValueError):
            objective = None
    if head.startswith("optimal"):
        status = OPTIMAL
    elif "infeasible" in head or "no feasible" in head:
        status = INFEASIBLE
    elif head.startswith("stopped") or "time" in head:
        status = FEASIBLE
    elif head.startswith("unbounded"):
        status = ERROR
    else:
        raise SolutionParseError(f"unrecognised CBC status line {lines[0]!r}")
    values: dict[str, float] = {}
    for line in lines[1:]:
        parts = line.replace("**", " ").split()
        if not parts:
            continue
        if len(parts) < 3:
            raise SolutionParseError(f"bad CBC solution line {line!r}")
        try:
            values[parts[1]] = float(parts[2])
        except ValueError as exc:
            raise SolutionParseError(f"bad CBC solution line {line!r}") from exc
    if status == FEASIBLE and objective is not None and objective > 1e50:
        status = ERROR
    if status == FEASIBLE and not values:
        status = ERROR
    if status == INFEASIBLE:
        values = {}
        objective = None
    return SolutionVector(status, objective, values, message=lines[0].strip())


# -- generic command ------------------------------------------------------------


def _solve_command(
    model: CdpModel, template: str, lp: Path, out: Path, start: Path | None, limit: float | None
) -> SolutionVector:
    fields = {
        "lp": str(lp),
        "solout": str(out),
        "timelimit": f"{limit:g}" if limit is not None else "0",
        "start": str(start) if start is not None else "",
    }
    argv = [tok.format(**fields) for tok in shlex.split(template)]
    argv = [a for a in argv if a != ""]
    proc = _run(argv, limit)
    if proc.returncode != 0:
        raise SolverCrashed(f"{argv[0]} exited with status {proc.returncode}: {proc.stderr.strip()[-300:]}")
    if not out.exists():
        raise SolutionParseError(f"{argv[0]} wrote no solution file {out}")
    return parse_value_lines(out.read_text())


def parse_value_lines(text: str) -> SolutionVector:
    status = None
    values: dict[str, float] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) >= 2 and parts[0].lower() == "status":
                status = parts[1].lower()
                if status not in STATUSES:
                    raise SolutionParseError(f"unknown status {parts[1]!r}")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SolutionParseError(f"expected 'name value', got {line!r}")
        try:
            values[parts[0]] = float(parts[1])
        except ValueError as exc:
            raise SolutionParseError(f"bad value in {line!r}") from exc
    if status is None:
        status = FEASIBLE if values else ERROR
    return SolutionVector(status, None, values if status in (OPTIMAL, FEASIBLE) else {})


# -- HiGHS via SciPy ----------------------------------------------------------------


def lp_matrices(prob: LpProblem):
    from scipy.sparse import csr_array  # noqa: PLC0415

    col = {v: k for k, v in enumerate(prob.columns)}
    nc = len(prob.columns)
    cost = np.zeros(nc)
    for v, c in prob.objective.items():
        cost[col[v]] = c
    if prob.sense == "max":
        cost = -cost
    data, ri, ci = [], [], []
    lo = np.empty(len(prob.rows))
    hi = np.empty(len(prob.rows))
    for r, row in enumerate(prob.rows):
        for v, c in row.coeffs.items():
            data.append(c)
            ri.append(r)
            ci.append(col[v])
        lo[r] = row.rhs if row.sense in (">=", "=") else -np.inf
        hi[r] = row.rhs if row.sense in ("<=", "=") else np.inf
    A = csr_array((data, (ri, ci)), shape=(len(prob.rows), nc))
    lb = np.zeros(nc)
    ub = np.full(nc, np.inf)
    for v, (a, b) in prob.bounds.items():
        lb[col[v]], ub[col[v]] = a, b
    integrality = np.zeros(nc)
    for v in prob.binaries:
        integrality[col[v]] = 1
        lb[col[v]] = max(lb[col[v]], 0.0)
        ub[col[v]] = min(ub[col[v]], 1.0)
    for v in prob.generals:
        integrality[col[v]] = 1
    return cost, A, lo, hi, lb, ub, integrality


def _solve_highs(model: CdpModel, limit: float | None) -> SolutionVector:
    from scipy.optimize import Bounds, LinearConstraint, milp  # noqa: PLC0415

    prob = read_lp(emit_lp(model))
    cost, A, lo, hi, lb, ub, integrality = lp_matrices(prob)
    options = {"disp": False}
    if limit is not None:
        options["time_limit"] = float(limit)
    try:
        res = milp(cost, constraints=LinearConstraint(A, lo, hi), integrality=integrality, bounds=Bounds(lb, ub), options=options)
    except Exception as exc:  # scipy raises plain ValueError/RuntimeError on solver failure
        raise SolverCrashed(f"HiGHS failed: {exc}") from exc
    values = {}
    if res.x is not None:
        values = {v: float(x) for v, x in zip(prob.columns, res.x)}
    if res.status == 0:
        status = OPTIMAL
    elif res.status == 2:
        status = INFEASIBLE
    elif res.status == 1:
        # stopped on a limit; with no incumbent, solve() falls back to the warm start
        status = FEASIBLE
    else:
        status = ERROR
    objective = float(res.fun) if status in (OPTIMAL, FEASIBLE) and values and res.fun is not None else None
    return SolutionVector(status, objective, values if status in (OPTIMAL, FEASIBLE) else {}, message=str(res.message))
