"""Recursive monomial templates and the greedy template scheduler.

C_D encodes every nonempty sub-monomial of a degree-D monomial on D qubits
in 2**D layers using only downward CNOTs (control index < target index).

Growing C_D into C_{D+1}:

* layers 1 .. 2**D - 1 replay C_D with its top qubit D moved onto the new
  qubit D+1; qubit D only rotates its singleton in layer 1;
* layer 2**D is CNOT(D -> D+1), so qubit D+1 now carries Z_D Z_{D-1} Z_{D+1};
* the last 2**D layers run two lock-stepped Gray walks over {1 .. D-1}:
  qubit D visits every Z_D Z_A and qubit D+1 every Z_{D+1} Z_D Z_A, both
  driven by CNOTs from lower qubits sitting in their singleton state. Qubit
  D+1 lags one layer behind qubit D, so a control is used in two consecutive
  layers and consecutive controls differ, which keeps every layer legal.

The invariant that makes the next step possible is that the last layer of
every template is the single gate CNOT(D-1 -> D).
"""

from __future__ import annotations

from collections.abc import Sequence

from .circuit import CNOT, Circuit, CircuitBuilder, Gate, Rotation
from .polynomial import HoboPolynomial, IsingPolynomial, Monomial, mask_monomial

MAX_DEGREE = 20


class TemplateError(ValueError):
    pass


def base_template() -> Circuit:
    """C_2: rotate both singletons, fold Z1 into qubit 2, rotate Z1Z2, unfold."""
    return Circuit(
        2,
        2,
        (
            (Rotation(0, (0,)), Rotation(1, (1,))),
            (CNOT(0, 1),),
            (Rotation(1, (0, 1)),),
            (CNOT(0, 1),),
        ),
    )


def _check_growable(c: Circuit, degree: int) -> None:
    if c.q != degree or c.n != degree:
        raise TemplateError(f"expected a {degree}-qubit template, got q={c.q}, n={c.n}")
    if c.num_layers != 1 << degree:
        raise TemplateError(f"C_{degree} must have {1 << degree} layers, got {c.num_layers}")
    if c.layers[-1] != (CNOT(degree - 2, degree - 1),):
        raise TemplateError(f"C_{degree} must end with the single gate CNOT({degree - 1}->{degree})")
    if any(g.control > g.target for g in c.cnots()):
        raise TemplateError("template contains an upward CNOT")


def grow_template(c_d: Circuit, degree: int) -> Circuit:
    """Build C_{degree+1} from C_degree (unit-coefficient rotations)."""
    _check_growable(c_d, degree)
    d = degree
    top, new = d - 1, d  # 0-based: old top qubit, added qubit
    half = 1 << d
    layers: list[list[Gate]] = [[] for _ in range(2 * half)]

    def lift(i: int) -> int:
        return new if i == top else i

    for k in range(half - 1):
        for g in c_d.layers[k]:
            if isinstance(g, CNOT):
                layers[k].append(CNOT(g.control, lift(g.target)))
            else:
                layers[k].append(Rotation(lift(g.qubit), tuple(lift(i) for i in g.monomial)))
    layers[0].append(Rotation(top, (top,)))
    layers[half - 1].append(CNOT(top, new))

    # second half: Gray walks over the lower qubits 0 .. top-1
    walk_top = 1 << top  # Z_D on qubit D
    walk_new = (1 << new) | (1 << top) | (1 << (top - 1))  # state left on D+1 by the first half
    steps = half // 2
    for u in range(1, steps + 1):
        ctrl = (u & -u).bit_length() - 1 if u < steps else top - 1
        s = half + 2 * (u - 1)
        layers[s].append(CNOT(ctrl, top))
        layers[s].append(Rotation(new, mask_monomial(walk_new)))
        walk_top ^= 1 << ctrl
        if u < steps:
            layers[s + 1].append(Rotation(top, mask_monomial(walk_top)))
            layers[s + 1].append(CNOT(ctrl, new))
            walk_new ^= 1 << ctrl
        else:
            layers[s + 1].append(CNOT(top, new))
    return Circuit(d + 1, d + 1, tuple(tuple(L) for L in layers))


class TemplateCache:
    """Memoized C_D per degree."""

    def __init__(self):
        self._store: dict[int, Circuit] = {2: base_template()}

    def get(self, degree: int) -> Circuit:
        if degree < 2:
            raise TemplateError("templates start at degree 2")
        if degree > MAX_DEGREE:
            raise TemplateError(f"degree {degree} exceeds supported maximum {MAX_DEGREE}")
        d = max(k for k in self._store if k <= degree)
        while d < degree:
            self._store[d + 1] = grow_template(self._store[d], d)
            d += 1
        return self._store[degree]

    def __contains__(self, degree: int) -> bool:
        return degree in self._store


TEMPLATES = TemplateCache()


def template(degree: int) -> Circuit:
    return TEMPLATES.get(degree)


def monomial_circuit(monomial: Sequence[int], coeff: float, q: int, n: int) -> Circuit:
    """The template for one HOBO monomial, mapped onto its variables with real angles.

    Local qubit k goes to the k-th smallest variable, which keeps CNOTs
    downward. Sub-monomial I gets angle ``coeff * (-1)^|I| / 2^|M|``.
    """
    mono = tuple(sorted(monomial))
    d = len(mono)
    scale = coeff / (1 << d)
    if d == 1:
        return Circuit(q, n, ((Rotation(mono[0], mono, -scale),),))
    layers = []
    for L in template(d).layers:
        out: list[Gate] = []
        for g in L:
            if isinstance(g, CNOT):
                out.append(CNOT(mono[g.control], mono[g.target]))
            else:
                sign = -1.0 if len(g.monomial) % 2 else 1.0
                out.append(Rotation(mono[g.qubit], tuple(mono[i] for i in g.monomial), sign * scale))
        layers.append(tuple(out))
    return Circuit(q, n, tuple(layers))


def compile_greedy(f: HoboPolynomial, h: IsingPolynomial | None = None) -> Circuit:
    """Place monomial templates one at a time where their qubits free up first.

    Each step picks the untreated monomial whose qubits are all available
    earliest (ties: lexicographically smallest index tuple) and lays its
    template down as a block starting at that layer. Overlapping monomials
    repeat their shared sub-monomials; the per-monomial angles still add up
    to H's coefficients. Constant terms are skipped.
    """
    if h is not None and h.n != f.n:
        raise ValueError("Hamiltonian and polynomial disagree on n")
    builder = CircuitBuilder(f.n, f.n)
    pending: list[tuple[Monomial, float]] = [(m, c) for m, c in f.terms if m]
    while pending:
        best = min(range(len(pending)), key=lambda i: (max(builder.free[j] for j in pending[i][0]), pending[i][0]))
        mono, coeff = pending.pop(best)
        start = max(builder.free[j] for j in mono)
        block = monomial_circuit(mono, coeff, f.n, f.n)
        for k, L in enumerate(block.layers):
            for g in L:
                builder.place(g, start + k)
        end = start + block.num_layers
        for j in mono:
            builder.free[j] = end
    return builder.build()


def merge_duplicates(c: Circuit, h: IsingPolynomial) -> Circuit:
    """Keep the first rotation of each monomial with H's full coefficient, drop the rest.

    Removing a rotation never changes parities, so the result is still valid;
    it is an exactly-once circuit whenever every monomial of H is present.
    Rotations whose monomials cancel out of H disappear entirely. Empty layers
    are dropped.
    """
    alphas = h.coefficients()
    seen: set[Monomial] = set()
    layers = []
    for L in c.layers:
        out: list[Gate] = []
        for g in L:
            if isinstance(g, Rotation):
                if g.monomial in seen or g.monomial not in alphas:
                    continue
                seen.add(g.monomial)
                g = Rotation(g.qubit, g.monomial, alphas[g.monomial])
            out.append(g)
        if out:
            layers.append(tuple(out))
    return Circuit(c.q, c.n, tuple(layers))
