"""CPLEX LP text for a :class:`CdpModel`, and a reader for the same subset.

The reader understands what the writer produces (plus free-form whitespace
and line wrapping), which is enough to hand the model to an in-process
solver and to round-trip golden files.
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

from .model import BINARY, CdpModel

MAX_LINE = 200


def _num(x: float) -> str:
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def _linear(coeffs) -> list[str]:
    parts = []
    for v, c in coeffs:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        parts.append(f"{sign} {v}" if mag == 1 else f"{sign} {_num(mag)} {v}")
    return parts


def _wrap(head: str, parts: list[str], tail: str = "") -> list[str]:
    lines = []
    cur = head
    for p in parts + ([tail] if tail else []):
        if len(cur) + 1 + len(p) > MAX_LINE and cur.strip():
            lines.append(cur)
            cur = "   "
        cur = f"{cur} {p}" if cur.strip() else f"{cur}{p}"
    lines.append(cur)
    return lines


def emit_lp(m: CdpModel) -> str:
    cfg = m.cfg
    out = [
        f"\\ CDP model: n={m.n} q={cfg.q} T={cfg.T} monomials={len(m.monomials)}"
        f" downward={int(cfg.downward_only)} symmetry={int(cfg.symmetry_break)} relax={int(cfg.relax_abd)}",
    ]
    for idx, mono in enumerate(m.monomials):
        out.append(f"\\ v{idx + 1} = " + " ".join(f"Z{i + 1}" for i in mono))
    out.append("Minimize")
    out.extend(_wrap(" obj:", _linear(m.objective.items())))
    out.append("Subject To")
    for r in m.rows:
        out.extend(_wrap(f" {r.name}:", _linear(r.coeffs), f"{r.sense} {_num(r.rhs)}"))
    out.append("Bounds")
    for v, kind in m.columns.items():
        if kind != BINARY:
            out.append(f" 0 <= {v} <= 1")
    out.append("Binaries")
    out.extend(_wrap("", m.binaries()))
    out.append("End")
    return "\n".join(out) + "\n"


def write_start(values: Mapping[str, float], path: str | Path) -> Path:
    """Warm-start sidecar: one ``name value`` pair per line."""
    path = Path(path)
    path.write_text("".join(f"{v} {_num(x)}\n" for v, x in values.items()))
    return path


def read_start(path: str | Path) -> dict[str, float]:
    out = {}
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if len(parts) == 2:
            out[parts[0]] = float(parts[1])
    return out


# -- reader ----------------------------------------------------------------------


class LpParseError(ValueError):
    pass


@dataclass
class LpRow:
    name: str
    coeffs: dict[str, float]
    sense: str
    rhs: float


@dataclass
class LpProblem:
    sense: str = "min"
    objective: dict[str, float] = field(default_factory=dict)
    rows: list[LpRow] = field(default_factory=list)
    bounds: dict[str, tuple[float, float]] = field(default_factory=dict)
    binaries: set[str] = field(default_factory=set)
    generals: set[str] = field(default_factory=set)
    columns: list[str] = field(default_factory=list)

    def _touch(self, v: str) -> None:
        if v not in self._seen:
            self._seen.add(v)
            self.columns.append(v)

    def __post_init__(self):
        self._seen: set[str] = set(self.columns)


_SECTIONS = {
    "minimize": "obj",
    "minimise": "obj",
    "minimum": "obj",
    "min": "obj",
    "maximize": "obj",
    "maximise": "obj",
    "maximum": "obj",
    "max": "obj",
    "subject to": "rows",
    "such that": "rows",
    "st": "rows",
    "s.t.": "rows",
    "bounds": "bounds",
    "bound": "bounds",
    "binaries": "bin",
    "binary": "bin",
    "bin": "bin",
    "generals": "gen",
    "general": "gen",
    "end": "end",
}
_TERM = re.compile(r"([+-])?\s*([0-9.eE+-]*[0-9.])?\s*([A-Za-z_][\w.\[\]]*)")
_SENSE = re.compile(r"(<=|>=|=<|=>|<|>|=)")


def _parse_linear(text: str, where: str) -> dict[str, float]:
    out: dict[str, float] = {}
    pos = 0
    text = text.strip()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        mt = _TERM.match(text, pos)
        if not mt or mt.end() == pos:
            raise LpParseError(f"{where}: cannot parse {text[pos:pos + 30]!r}")
        sign = -1.0 if mt.group(1) == "-" else 1.0
        coef = float(mt.group(2)) if mt.group(2) else 1.0
        out[mt.group(3)] = out.get(mt.group(3), 0.0) + sign * coef
        pos = mt.end()
    return out


def read_lp(text: str) -> LpProblem:
    prob = LpProblem()
    section = None
    statements: list[tuple[str, str]] = []
    buf: list[str] = []

    def flush():
        if buf and section is not None:
            statements.append((section, " ".join(buf)))
        buf.clear()

    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in _SECTIONS:
            flush()
            if key.startswith("max"):
                prob.sense = "max"
            section = _SECTIONS[key]
            continue
        if section is None:
            raise LpParseError(f"content before any section: {line!r}")
        if section in ("rows", "bounds"):
            # a new statement starts with "name:" or, in bounds, with any complete line
            starts = bool(re.match(r"[A-Za-z_][\w.\[\]]*\s*:", line)) or section == "bounds"
            if starts or not buf:
                flush()
            buf.append(line)
            if section == "rows" and not _SENSE.search(" ".join(buf)):
                continue
            if section == "rows":
                # keep collecting until the rhs number is present
                after = _SENSE.split(" ".join(buf), maxsplit=1)[-1].strip()
                if not after:
                    continue
            flush()
        else:
            buf.append(line)
    flush()

    for sec, stmt in statements:
        if sec == "obj":
            body = stmt.split(":", 1)[1] if re.match(r"\s*[A-Za-z_][\w.]*\s*:", stmt) else stmt
            for v, c in _parse_linear(body, "objective").items():
                prob.objective[v] = prob.objective.get(v, 0.0) + c
                prob._touch(v)
        elif sec == "rows":
            name, body = stmt.split(":", 1) if ":" in stmt else (f"R{len(prob.rows) + 1}", stmt)
            parts = _SENSE.split(body, maxsplit=1)
            if len(parts) != 3:
                raise LpParseError(f"row {name.strip()}: missing sense")
            lhs, sense, rhs = parts
            sense = {"=<": "<=", "<": "<=", "=>": ">=", ">": ">="}.get(sense, sense)
            coeffs = _parse_linear(lhs, f"row {name.strip()}")
            for v in coeffs:
                prob._touch(v)
            try:
                value = float(rhs)
            except ValueError as exc:
                raise LpParseError(f"row {name.strip()}: bad rhs {rhs!r}") from exc
            prob.rows.append(LpRow(name.strip(), coeffs, sense, value))
        elif sec == "bounds":
            toks = stmt.split()
            if len(toks) == 5 and toks[1] in ("<=", "<") and toks[3] in ("<=", "<"):
                prob.bounds[toks[2]] = (float(toks[0]), float(toks[4]))
                prob._touch(toks[2])
            elif len(toks) == 2 and toks[1].lower() == "free":
                prob.bounds[toks[0]] = (float("-inf"), float("inf"))
                prob._touch(toks[0])
            elif len(toks) == 3 and toks[1] in ("<=", ">=", "="):
                lo, hi = prob.bounds.get(toks[0], (0.0, float("inf")))
                x = float(toks[2])
                prob.bounds[toks[0]] = {"<=": (lo, x), ">=": (x, hi), "=": (x, x)}[toks[1]]
                prob._touch(toks[0])
            else:
                raise LpParseError(f"unsupported bound {stmt!r}")
        elif sec in ("bin", "gen"):
            for v in stmt.split():
                (prob.binaries if sec == "bin" else prob.generals).add(v)
                prob._touch(v)
    return prob
