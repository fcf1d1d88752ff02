"""Independent correctness checks for compiled circuits.

``check_symbolic`` replays the parity table and audits every rotation;
``check_statevector`` simulates the diagonal unitary on all basis states and
compares phases against exp(-i gamma H(z)). Neither raises on a bad circuit:
the outcome is always a :class:`VerificationReport`.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .circuit import Circuit
from .polynomial import IsingPolynomial, Monomial, monomial_mask

EXACTLY_ONCE = "exactly-once"
ANGLE_SUM = "angle-sum"
TOL = 1e-9
MAX_STATEVECTOR_QUBITS = 14


@dataclass
class VerificationReport:
    passed: bool
    rotation_ledger: dict[Monomial, float] = field(default_factory=dict)
    first_failure: tuple[int | None, int | None, str] | None = None
    check: str = "symbolic"

    def fail(self, layer: int | None, qubit: int | None, reason: str) -> VerificationReport:
        self.passed = False
        if self.first_failure is None:
            self.first_failure = (layer, qubit, reason)
        return self

    def to_dict(self) -> dict:
        fail = None
        if self.first_failure is not None:
            layer, qubit, reason = self.first_failure
            fail = {
                "layer": None if layer is None else layer + 1,
                "qubit": None if qubit is None else qubit + 1,
                "reason": reason,
            }
        return {
            "check": self.check,
            "passed": self.passed,
            "ledger": [
                {"monomial": [i + 1 for i in m], "alpha": a} for m, a in sorted(self.rotation_ledger.items())
            ],
            "first_failure": fail,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def __bool__(self) -> bool:
        return self.passed


def _fmt(m: Iterable[int]) -> str:
    return "Z" + "Z".join(str(i + 1) for i in m) if m else "1"


def check_symbolic(c: Circuit, h: IsingPolynomial, mode: str = EXACTLY_ONCE) -> VerificationReport:
    """Audit the circuit against H by parity simulation.

    Every rotation must sit on a qubit whose parity equals its tag; the final
    parity table must equal the initial one; every monomial of H must be
    covered. In exactly-once mode each monomial gets one rotation carrying its
    full coefficient; in angle-sum mode the applied coefficients per monomial
    must add up to H's coefficient.
    """
    if mode not in (EXACTLY_ONCE, ANGLE_SUM):
        raise ValueError(f"unknown mode {mode!r}")
    report = VerificationReport(True, check=f"symbolic/{mode}")
    if c.n != h.n:
        return report.fail(None, None, f"circuit has n={c.n} problem qubits, Hamiltonian has n={h.n}")

    init = [(1 << i) if i < c.n else 0 for i in range(c.q)]
    kinds, a, b, _, where = kernels.encode_ops(c)
    observed, final = kernels.trace_parities(init, kinds, a, b)

    target = h.coefficients()
    ledger: dict[Monomial, float] = {}
    first_site: dict[Monomial, tuple[int, int]] = {}
    for k, (layer, g) in enumerate(where):
        if kinds[k] != 1:
            continue
        if int(observed[k]) != monomial_mask(g.monomial):
            held = [i for i in range(c.n) if observed[k] >> i & 1]
            report.fail(
                layer,
                g.qubit,
                f"rotation for {_fmt(g.monomial)} but qubit holds {_fmt(held)}",
            )
        if mode == EXACTLY_ONCE:
            if g.monomial in ledger:
                report.fail(layer, g.qubit, f"{_fmt(g.monomial)} rotated more than once")
            elif g.monomial not in target:
                report.fail(layer, g.qubit, f"{_fmt(g.monomial)} is not a monomial of H")
            elif abs(g.alpha - target[g.monomial]) > TOL:
                report.fail(
                    layer,
                    g.qubit,
                    f"{_fmt(g.monomial)} rotated by {g.alpha!r}, expected {target[g.monomial]!r}",
                )
        ledger[g.monomial] = ledger.get(g.monomial, 0.0) + g.alpha
        first_site.setdefault(g.monomial, (layer, g.qubit))
    report.rotation_ledger = ledger

    for i, m in enumerate(final):
        if int(m) != init[i]:
            report.fail(len(c.layers) - 1 if c.layers else None, i, "parity not restored at the end (missing uncompute)")
            break

    for mono, alpha in h.terms:
        if mono not in ledger:
            report.fail(None, None, f"{_fmt(mono)} never rotated")
        elif mode == ANGLE_SUM and abs(ledger[mono] - alpha) > TOL:
            layer, qubit = first_site[mono]
            report.fail(layer, qubit, f"{_fmt(mono)} total angle {ledger[mono]!r}, expected {alpha!r}")
    if mode == ANGLE_SUM:
        for mono, total in ledger.items():
            if mono not in target and abs(total) > TOL:
                layer, qubit = first_site[mono]
                report.fail(layer, qubit, f"{_fmt(mono)} is not a monomial of H but totals {total!r}")
    return report


def _wrap(x: np.ndarray) -> np.ndarray:
    return np.angle(np.exp(1j * x))


def ising_phases(h: IsingPolynomial, gamma: float) -> np.ndarray:
    """-gamma * H(z) for every basis label x (bit i of x set means z_i = -1).

    Computed term by term with its own loop so it shares nothing with the
    circuit simulation.
    """
    size = 1 << h.n
    x = np.arange(size, dtype=np.int64)
    energy = np.full(size, h.constant, dtype=np.float64)
    for mono, alpha in h.terms:
        par = np.zeros(size, dtype=np.int64)
        for i in mono:
            par ^= (x >> i) & 1
        energy += alpha * (1 - 2 * par)
    return -gamma * energy


def check_statevector(c: Circuit, h: IsingPolynomial, gamma: float = 1.0) -> VerificationReport:
    """Compare the circuit's diagonal with exp(-i gamma H) up to one global phase.

    Ancillas start in |0>, so only the 2**n problem basis states are simulated.
    """
    if c.q > MAX_STATEVECTOR_QUBITS:
        raise ValueError(f"statevector check limited to {MAX_STATEVECTOR_QUBITS} qubits (got {c.q})")
    report = VerificationReport(True, check=f"statevector/gamma={gamma!r}")
    if c.n != h.n:
        return report.fail(None, None, f"circuit has n={c.n} problem qubits, Hamiltonian has n={h.n}")

    kinds, a, b, theta, where = kernels.encode_ops(c)
    ledger: dict[Monomial, float] = {}
    for _, g in where:
        if hasattr(g, "monomial"):
            ledger[g.monomial] = ledger.get(g.monomial, 0.0) + g.alpha
    report.rotation_ledger = ledger

    # ancillas are the high bits, so labels < 2**n have every ancilla in |0>;
    # a dirty ancilla shows up as a label >= 2**n
    phases, labels = kernels.diagonal_phases(c.n, kinds, a, b, gamma * theta)
    moved = np.nonzero(labels != np.arange(labels.size))[0]
    if moved.size:
        x = int(moved[0])
        return report.fail(None, None, f"basis state {x} mapped to {int(labels[x])}: circuit is not diagonal")
    expected = ising_phases(h, gamma)
    diff = _wrap(phases - expected)
    diff = _wrap(diff - diff[0])
    worst = int(np.argmax(np.abs(diff)))
    if abs(diff[worst]) > TOL:
        return report.fail(
            None,
            None,
            f"phase mismatch {float(diff[worst]):.3e} rad on basis state {worst}",
        )
    return report


def random_gammas(count: int, seed: int = 2024) -> list[float]:
    rng = np.random.default_rng(seed)
    return [float(g) for g in rng.uniform(0.1, math.pi, size=count)]


def verify_all(
    c: Circuit,
    h: IsingPolynomial,
    mode: str = ANGLE_SUM,
    gammas: Iterable[float] | None = None,
    statevector: bool | None = None,
) -> list[VerificationReport]:
    """Symbolic check plus statevector checks (when q is small enough)."""
    reports = [check_symbolic(c, h, mode)]
    if statevector is None:
        statevector = c.q <= MAX_STATEVECTOR_QUBITS
    if statevector:
        for gamma in gammas if gammas is not None else random_gammas(3):
            reports.append(check_statevector(c, h, gamma))
    return reports
