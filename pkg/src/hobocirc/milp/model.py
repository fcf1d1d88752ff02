"""The circuit design problem as a mixed-integer linear program.

Columns (layers k are 1-based in names, qubits and variables 1-based too):

* ``a_k``            layer k is active
* ``c_k_i_j``        CNOT from qubit i to qubit j on layer k
* ``r_k_i_v<id>``    rotation for Ising monomial #id on qubit i on layer k
* ``d_k_i_v<id>``    qubit i holds monomial #id after layer k (k = 0 .. T-1)
* ``b_k_i_p``        variable p is in qubit i's parity after layer k (k = 1 .. T)
* ``w_k_j_i_p``      c_k_j_i * b_{k-1}_j_p
* ``u_k_i_p``        b_{k-1}_i_p * sum_j w_k_j_i_p

The layer-0 parities are the initial singletons and enter rows as
constants, which also removes the k = 1 products. The XOR propagation
b^k = b^{k-1} xor X (X = sum_j c b, at most 1 by uniqueness) is written as
b^k = b^{k-1} + X - 2 u with u the product b^{k-1} X.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from ..circuit import CNOT, Circuit, Rotation, final_parity
from ..polynomial import IsingPolynomial, Monomial, monomial_mask
from ..verify import EXACTLY_ONCE, check_symbolic

BINARY = "binary"
CONTINUOUS = "continuous"
ROUND_TOL = 1e-6


class ModelError(ValueError):
    pass


class DecodeError(RuntimeError):
    """A solution does not describe a valid circuit (solver or format bug)."""


@dataclass(frozen=True)
class CdpConfig:
    q: int
    T: int
    downward_only: bool = False
    symmetry_break: bool = True
    relax_abd: bool = False
    warm_start: Circuit | None = None
    time_limit: float | None = None

    def __post_init__(self):
        if self.T < 1:
            raise ModelError("T must be at least 1")
        if self.q < 1:
            raise ModelError("q must be at least 1")


@dataclass(frozen=True)
class Row:
    name: str
    coeffs: tuple[tuple[str, float], ...]
    sense: str  # "<=", ">=", "="
    rhs: float
    family: str

    def activity(self, values: Mapping[str, float]) -> float:
        return sum(c * values.get(v, 0.0) for v, c in self.coeffs)

    def holds(self, values: Mapping[str, float], tol: float = ROUND_TOL) -> bool:
        lhs = self.activity(values)
        if self.sense == "<=":
            return lhs <= self.rhs + tol
        if self.sense == ">=":
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol


@dataclass
class CdpModel:
    h: IsingPolynomial
    cfg: CdpConfig
    columns: dict[str, str] = field(default_factory=dict)  # name -> kind, insertion order is column order
    rows: list[Row] = field(default_factory=list)
    objective: dict[str, float] = field(default_factory=dict)
    start: dict[str, float] | None = None

    @property
    def n(self) -> int:
        return self.h.n

    @property
    def monomials(self) -> list[Monomial]:
        return self.h.monomials

    def add_column(self, name: str, kind: str) -> str:
        if name in self.columns:
            raise ModelError(f"duplicate column {name}")
        self.columns[name] = kind
        return name

    def add_row(self, name: str, expr: _Expr, sense: str, rhs: float, family: str) -> None:
        coeffs = tuple((v, c) for v, c in expr.terms.items() if c != 0)
        rhs = rhs - expr.const
        if not coeffs:
            # a constant row must hold on its own; anything else is a builder bug
            if not Row(name, (), sense, rhs, family).holds({}):
                raise ModelError(f"row {name} is constant and violated")
            return
        self.rows.append(Row(name, coeffs, sense, rhs, family))

    def binaries(self) -> list[str]:
        return [v for v, kind in self.columns.items() if kind == BINARY]

    def families(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rows:
            out[r.family] = out.get(r.family, 0) + 1
        return out

    def violated(self, values: Mapping[str, float], tol: float = ROUND_TOL) -> list[str]:
        """Names of rows, bounds and integrality conditions the assignment breaks."""
        bad = [r.name for r in self.rows if not r.holds(values, tol)]
        for v, kind in self.columns.items():
            x = values.get(v, 0.0)
            if x < -tol or x > 1 + tol:
                bad.append(f"bound:{v}")
            elif kind == BINARY and min(abs(x), abs(x - 1)) > tol:
                bad.append(f"integrality:{v}")
        unknown = set(values) - set(self.columns)
        bad.extend(f"unknown:{v}" for v in sorted(unknown))
        return bad

    def objective_value(self, values: Mapping[str, float]) -> float:
        return sum(c * values.get(v, 0.0) for v, c in self.objective.items())


# -- names ---------------------------------------------------------------------


def a_(k: int) -> str:
    return f"a_{k}"


def c_(k: int, i: int, j: int) -> str:
    return f"c_{k}_{i + 1}_{j + 1}"


def r_(k: int, i: int, v: int) -> str:
    return f"r_{k}_{i + 1}_v{v + 1}"


def d_(k: int, i: int, v: int) -> str:
    return f"d_{k}_{i + 1}_v{v + 1}"


def b_(k: int, i: int, p: int) -> str:
    return f"b_{k}_{i + 1}_{p + 1}"


def w_(k: int, j: int, i: int, p: int) -> str:
    return f"w_{k}_{j + 1}_{i + 1}_{p + 1}"


def u_(k: int, i: int, p: int) -> str:
    return f"u_{k}_{i + 1}_{p + 1}"


class _Expr:
    """Sparse linear expression plus constant."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: Mapping[str, float] | None = None, const: float = 0.0):
        self.terms: dict[str, float] = dict(terms or {})
        self.const = const

    def add(self, other: _Expr | str | float, scale: float = 1.0) -> _Expr:
        if isinstance(other, _Expr):
            for v, c in other.terms.items():
                self.terms[v] = self.terms.get(v, 0.0) + scale * c
            self.const += scale * other.const
        elif isinstance(other, str):
            self.terms[other] = self.terms.get(other, 0.0) + scale
        else:
            self.const += scale * other
        return self


def _e(*parts: tuple[float, _Expr | str | float]) -> _Expr:
    e = _Expr()
    for scale, x in parts:
        e.add(x, scale)
    return e


# -- builder -------------------------------------------------------------------


def _initial(q: int, n: int) -> list[int]:
    return [(1 << i) if i < n else 0 for i in range(q)]


def build_model(h: IsingPolynomial, cfg: CdpConfig) -> CdpModel:
    if not h.terms:
        raise ModelError("Hamiltonian has no non-constant terms")
    n, q, T = h.n, cfg.q, cfg.T
    if q < n:
        raise ModelError(f"qubit budget q={q} is below the number of variables n={n}")
    m = CdpModel(h, cfg)
    P = h.monomials
    V = range(len(P))
    soft = CONTINUOUS if cfg.relax_abd else BINARY
    init = _initial(q, n)

    def fixed_zero(k: int, j: int, i: int) -> bool:
        return j == i or (cfg.downward_only and j > i)

    for k in range(1, T + 1):
        m.add_column(a_(k), soft)
    for k in range(1, T + 1):
        for i in range(q):
            for j in range(q):
                m.add_column(c_(k, i, j), BINARY)
    for k in range(1, T + 1):
        for i in range(q):
            for v in V:
                m.add_column(r_(k, i, v), BINARY)
    for k in range(T):
        for i in range(q):
            for v in V:
                m.add_column(d_(k, i, v), soft)
    for k in range(1, T + 1):
        for i in range(q):
            for p in range(n):
                m.add_column(b_(k, i, p), soft)

    def b(k: int, i: int, p: int) -> _Expr | str:
        if k == 0:
            return _Expr(const=float(init[i] >> p & 1))
        return b_(k, i, p)

    for k in range(2, T + 1):
        for i in range(q):
            for p in range(n):
                for j in range(q):
                    if not fixed_zero(k, j, i):
                        m.add_column(w_(k, j, i, p), CONTINUOUS)
                m.add_column(u_(k, i, p), CONTINUOUS)

    m.objective = {a_(k): 1.0 for k in range(1, T + 1)}

    # activity and uniqueness
    for k in range(1, T + 1):
        for i in range(q):
            e = _Expr()
            for j in range(q):
                if j != i:
                    e.add(c_(k, i, j)).add(c_(k, j, i))
            for v in V:
                e.add(r_(k, i, v))
            e.add(a_(k), -1.0)
            m.add_row(f"act_{k}_{i + 1}", e, "<=", 0.0, "activity")
    # no self-control
    for k in range(1, T + 1):
        for i in range(q):
            m.add_row(f"self_{k}_{i + 1}", _e((1, c_(k, i, i))), "=", 0.0, "no-self-control")
    if cfg.downward_only:
        for k in range(1, T + 1):
            for i in range(q):
                for j in range(i):
                    m.add_row(f"down_{k}_{i + 1}_{j + 1}", _e((1, c_(k, i, j))), "=", 0.0, "downward")
    # every monomial exactly once
    for v in V:
        e = _Expr()
        for k in range(1, T + 1):
            for i in range(q):
                e.add(r_(k, i, v))
        m.add_row(f"once_v{v + 1}", e, "=", 1.0, "exactly-once")
    # monomial check, layers 0 .. T-1
    for k in range(T):
        for i in range(q):
            for v in V:
                inside = set(P[v])
                lower = _e((1, d_(k, i, v)))
                for p in range(n):
                    if p in inside:
                        m.add_row(f"din_{k}_{i + 1}_v{v + 1}_{p + 1}", _e((1, d_(k, i, v)), (-1, b(k, i, p))), "<=", 0.0, "monomial-check")
                        lower.add(b(k, i, p), -1.0)
                    else:
                        m.add_row(f"dout_{k}_{i + 1}_v{v + 1}_{p + 1}", _e((1, d_(k, i, v)), (1, b(k, i, p))), "<=", 1.0, "monomial-check")
                        lower.add(b(k, i, p), 1.0)
                m.add_row(f"dall_{k}_{i + 1}_v{v + 1}", lower, ">=", 1.0 - len(inside), "monomial-check")
    # rotation validity
    for k in range(1, T + 1):
        for i in range(q):
            for v in V:
                m.add_row(f"rot_{k}_{i + 1}_v{v + 1}", _e((1, r_(k, i, v)), (-1, d_(k - 1, i, v))), "<=", 0.0, "rotation-validity")
    # propagation
    for k in range(1, T + 1):
        for i in range(q):
            for p in range(n):
                x = _Expr()
                for j in range(q):
                    if fixed_zero(k, j, i):
                        continue
                    if k == 1:
                        x.add(c_(k, j, i), float(init[j] >> p & 1))
                        continue
                    w = w_(k, j, i, p)
                    x.add(w)
                    tag = f"{k}_{j + 1}_{i + 1}_{p + 1}"
                    m.add_row(f"wc_{tag}", _e((1, w), (-1, c_(k, j, i))), "<=", 0.0, "linearization")
                    m.add_row(f"wb_{tag}", _e((1, w), (-1, b(k - 1, j, p))), "<=", 0.0, "linearization")
                    m.add_row(f"wl_{tag}", _e((1, w), (-1, c_(k, j, i)), (-1, b(k - 1, j, p))), ">=", -1.0, "linearization")
                tag = f"{k}_{i + 1}_{p + 1}"
                prev = b(k - 1, i, p)
                if k == 1:
                    # u = b0 * X with b0 constant
                    u = _Expr().add(x, prev.const)
                else:
                    u = _Expr({u_(k, i, p): 1.0})
                    m.add_row(f"ub_{tag}", _e((1, u), (-1, prev)), "<=", 0.0, "linearization")
                    m.add_row(f"ux_{tag}", _e((1, u), (-1, x)), "<=", 0.0, "linearization")
                    m.add_row(f"ul_{tag}", _e((1, u), (-1, prev), (-1, x)), ">=", -1.0, "linearization")
                e = _e((1, b_(k, i, p)), (-1, prev), (-1, x), (2, u))
                m.add_row(f"prop_{tag}", e, "=", 0.0, "propagation")
    # final conditions: everything back to the initial singletons
    for i in range(q):
        for p in range(n):
            m.add_row(f"fin_{i + 1}_{p + 1}", _e((1, b_(T, i, p))), "=", float(init[i] >> p & 1), "final")
    if cfg.symmetry_break:
        for k in range(1, T):
            m.add_row(f"sym_{k}", _e((1, a_(k)), (-1, a_(k + 1))), ">=", 0.0, "symmetry")

    if cfg.warm_start is not None:
        m.start = encode_circuit(m, cfg.warm_start)
    return m


def expected_column_count(h: IsingPolynomial, cfg: CdpConfig) -> int:
    """T + q^2 T + 2 q T |P| + n q T, plus the product auxiliaries."""
    n, q, T, P = h.n, cfg.q, cfg.T, len(h.terms)
    base = T + q * q * T + 2 * q * T * P + n * q * T
    open_pairs = sum(1 for j in range(q) for i in range(q) if j != i and not (cfg.downward_only and j > i))
    return base + (T - 1) * n * (open_pairs + q)


# -- circuits <-> assignments --------------------------------------------------


def encode_circuit(m: CdpModel, c: Circuit) -> dict[str, float]:
    """Column values describing ``c`` (empty layers dropped, then padded to T)."""
    cfg, h = m.cfg, m.h
    c = c.strip_empty()
    if c.q > cfg.q or c.n != h.n:
        raise ModelError(f"circuit (q={c.q}, n={c.n}) does not fit q={cfg.q}, n={h.n}")
    if c.num_layers > cfg.T:
        raise ModelError(f"circuit depth {c.num_layers} exceeds T={cfg.T}")
    report = check_symbolic(c, h, EXACTLY_ONCE)
    if not report.passed:
        raise ModelError(f"circuit is not an exactly-once realization of H: {report.first_failure}")
    index = {mono: v for v, mono in enumerate(m.monomials)}
    masks = [monomial_mask(mono) for mono in m.monomials]
    q, n, T = cfg.q, h.n, cfg.T
    vals = {name: 0.0 for name in m.columns}
    state = _initial(q, n)
    for k in range(T):
        for i in range(q):
            for v, mask in enumerate(masks):
                if state[i] == mask:
                    vals[d_(k, i, v)] = 1.0
        layer = c.layers[k] if k < c.num_layers else ()
        K = k + 1
        if layer:
            vals[a_(K)] = 1.0
        new = list(state)
        for g in layer:
            if isinstance(g, CNOT):
                vals[c_(K, g.control, g.target)] = 1.0
                new[g.target] ^= state[g.control]
            else:
                vals[r_(K, g.qubit, index[g.monomial])] = 1.0
        for i in range(q):
            for p in range(n):
                vals[b_(K, i, p)] = float(new[i] >> p & 1)
                if K >= 2:
                    x = 0
                    for j in range(q):
                        name = w_(K, j, i, p)
                        if name in vals:
                            wv = int(vals[c_(K, j, i)]) & (state[j] >> p & 1)
                            vals[name] = float(wv)
                            x += wv
                    vals[u_(K, i, p)] = float((state[i] >> p & 1) * x)
        state = new
    return vals


def _round(m: CdpModel, values: Mapping[str, float]) -> dict[str, float]:
    return {name: 1.0 if float(values.get(name, 0.0)) >= 0.5 else 0.0 for name in m.columns}


def decode_solution(m: CdpModel, values) -> Circuit:
    """Circuit from column values: CNOT where c = 1, rotation (angle from H) where r = 1.

    Values are rounded at 0.5; the rounded assignment must satisfy every row
    and the circuit must pass the exactly-once audit, otherwise DecodeError.
    Empty layers are dropped.
    """
    if not isinstance(values, Mapping):
        values = values.values
    cfg, h = m.cfg, m.h
    rounded = _round(m, values)
    bad = m.violated(rounded)
    if bad:
        raise DecodeError(f"rounded solution violates {len(bad)} rows, first {bad[0]}")
    alphas = h.coefficients()
    layers = []
    for k in range(1, cfg.T + 1):
        gates = []
        for i in range(cfg.q):
            for j in range(cfg.q):
                if i != j and rounded[c_(k, i, j)]:
                    gates.append(CNOT(i, j))
            for v, mono in enumerate(m.monomials):
                if rounded[r_(k, i, v)]:
                    gates.append(Rotation(i, mono, alphas[mono]))
        if gates:
            layers.append(tuple(gates))
    try:
        circuit = Circuit(cfg.q, h.n, tuple(layers))
    except ValueError as exc:
        raise DecodeError(f"solution does not form a layered circuit: {exc}") from exc
    report = check_symbolic(circuit, h, EXACTLY_ONCE)
    if not report.passed:
        raise DecodeError(f"decoded circuit fails exactly-once audit: {report.first_failure}")
    if any(final_parity(circuit).masks[i] != s for i, s in enumerate(_initial(cfg.q, h.n))):
        raise DecodeError("decoded circuit does not restore the initial parities")
    return circuit


def columns_of_kind(m: CdpModel, prefix: str) -> Iterable[str]:
    return (v for v in m.columns if v.split("_", 1)[0] == prefix)
