"""Layered circuits over CNOT and Z-phase rotations.

Qubits and monomial indices are 0-based in memory; the JSON dump is 1-based
to match the text polynomial format. Qubits ``n .. q-1`` are ancillas.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Union

from .polynomial import Monomial, mask_monomial, monomial_mask


class CircuitError(ValueError):
    """A gate or layer violates the circuit invariants."""


@dataclass(frozen=True)
class CNOT:
    control: int
    target: int

    def __post_init__(self):
        if self.control == self.target:
            raise CircuitError(f"qubit {self.control} cannot control itself")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)


@dataclass(frozen=True)
class Rotation:
    """exp(-i * gamma * alpha * Z) on ``qubit``, which must hold the parity ``monomial``."""

    qubit: int
    monomial: Monomial
    alpha: float = 1.0

    def __post_init__(self):
        mono = tuple(sorted(set(self.monomial)))
        if not mono:
            raise CircuitError("rotation monomial must be nonempty")
        object.__setattr__(self, "monomial", mono)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


Gate = Union[CNOT, Rotation]
Layer = tuple[Gate, ...]


def _gate_key(g: Gate) -> tuple[int, int]:
    return (min(g.qubits), 0 if isinstance(g, CNOT) else 1)


def _check_layer(layer: Iterable[Gate], q: int, n: int, index: int) -> Layer:
    seen: set[int] = set()
    out = []
    for g in layer:
        if not isinstance(g, (CNOT, Rotation)):
            raise CircuitError(f"layer {index}: unsupported gate {g!r}")
        for qb in g.qubits:
            if not 0 <= qb < q:
                raise CircuitError(f"layer {index}: qubit {qb} outside [0, {q})")
            if qb in seen:
                raise CircuitError(f"layer {index}: qubit {qb} acted on twice")
            seen.add(qb)
        if isinstance(g, Rotation) and g.monomial[-1] >= n:
            raise CircuitError(f"layer {index}: monomial {g.monomial} references a non-problem variable")
        out.append(g)
    out.sort(key=_gate_key)
    return tuple(out)


@dataclass(frozen=True)
class Circuit:
    """Immutable list of layers; gates within a layer act on disjoint qubits."""

    q: int
    n: int
    layers: tuple[Layer, ...] = ()

    def __post_init__(self):
        if self.n < 0 or self.q < self.n:
            raise CircuitError(f"need 0 <= n <= q (got n={self.n}, q={self.q})")
        checked = tuple(_check_layer(L, self.q, self.n, k) for k, L in enumerate(self.layers))
        object.__setattr__(self, "layers", checked)

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    @property
    def depth(self) -> int:
        return depth(self)

    def gates(self) -> Iterable[tuple[int, Gate]]:
        for k, layer in enumerate(self.layers):
            for g in layer:
                yield k, g

    def rotations(self) -> list[Rotation]:
        return [g for _, g in self.gates() if isinstance(g, Rotation)]

    def cnots(self) -> list[CNOT]:
        return [g for _, g in self.gates() if isinstance(g, CNOT)]

    def gate_count(self) -> int:
        return sum(len(L) for L in self.layers)

    def strip_empty(self) -> Circuit:
        return Circuit(self.q, self.n, tuple(L for L in self.layers if L))

    def compact(self) -> Circuit:
        """Repack every gate into the earliest layer after its qubits' previous gates."""
        free = [0] * self.q
        packed: list[list[Gate]] = []
        for _, g in self.gates():
            k = max(free[qb] for qb in g.qubits)
            while len(packed) <= k:
                packed.append([])
            packed[k].append(g)
            for qb in g.qubits:
                free[qb] = k + 1
        return Circuit(self.q, self.n, tuple(tuple(L) for L in packed))

    def remap(self, qubit_map: Sequence[int] | Mapping[int, int], q: int, n: int) -> Circuit:
        """Relabel qubits (and the variables of rotation tags) through ``qubit_map``."""
        m = _as_map(qubit_map, self.q)
        layers = []
        for L in self.layers:
            new = []
            for g in L:
                if isinstance(g, CNOT):
                    new.append(CNOT(m[g.control], m[g.target]))
                else:
                    new.append(Rotation(m[g.qubit], tuple(m[i] for i in g.monomial), g.alpha))
            layers.append(tuple(new))
        return Circuit(q, n, tuple(layers))

    def to_dict(self) -> dict:
        layers = []
        for L in self.layers:
            out = []
            for g in L:
                if isinstance(g, CNOT):
                    out.append({"op": "cx", "ctrl": g.control + 1, "tgt": g.target + 1})
                else:
                    out.append(
                        {
                            "op": "rz",
                            "qubit": g.qubit + 1,
                            "monomial": [i + 1 for i in g.monomial],
                            "alpha": g.alpha,
                        }
                    )
            layers.append(out)
        return {"q": self.q, "n": self.n, "layers": layers}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping) -> Circuit:
        layers = []
        for k, L in enumerate(data["layers"]):
            gates: list[Gate] = []
            for g in L:
                op = g.get("op")
                if op == "cx":
                    gates.append(CNOT(int(g["ctrl"]) - 1, int(g["tgt"]) - 1))
                elif op == "rz":
                    mono = tuple(int(i) - 1 for i in g["monomial"])
                    gates.append(Rotation(int(g["qubit"]) - 1, mono, float(g.get("alpha", 1.0))))
                else:
                    raise CircuitError(f"layer {k}: unknown op {op!r}")
            layers.append(tuple(gates))
        return cls(int(data["q"]), int(data["n"]), tuple(layers))

    @classmethod
    def from_json(cls, text: str) -> Circuit:
        return cls.from_dict(json.loads(text))


def _as_map(qubit_map, size: int) -> dict[int, int]:
    if isinstance(qubit_map, Mapping):
        m = dict(qubit_map)
    else:
        m = dict(enumerate(qubit_map))
    missing = [i for i in range(size) if i not in m]
    if missing:
        raise CircuitError(f"qubit map does not cover qubits {missing}")
    targets = [m[i] for i in range(size)]
    if len(set(targets)) != len(targets):
        raise CircuitError("qubit map is not injective")
    return m


def depth(c: Circuit) -> int:
    """Number of non-empty layers."""
    return sum(1 for L in c.layers if L)


class CircuitBuilder:
    """Mutable staging area; ``place`` puts a gate in a given layer, ``place_earliest`` packs ASAP."""

    def __init__(self, q: int, n: int):
        self.q = q
        self.n = n
        self._layers: list[list[Gate]] = []
        self._busy: list[set[int]] = []
        self.free = [0] * q

    def _ensure(self, k: int):
        while len(self._layers) <= k:
            self._layers.append([])
            self._busy.append(set())

    def place(self, gate: Gate, layer: int) -> None:
        self._ensure(layer)
        clash = self._busy[layer].intersection(gate.qubits)
        if clash:
            raise CircuitError(f"layer {layer}: qubit {min(clash)} already used")
        self._layers[layer].append(gate)
        self._busy[layer].update(gate.qubits)
        for qb in gate.qubits:
            self.free[qb] = max(self.free[qb], layer + 1)

    def place_earliest(self, gate: Gate) -> int:
        k = max(self.free[qb] for qb in gate.qubits)
        self.place(gate, k)
        return k

    def build(self) -> Circuit:
        return Circuit(self.q, self.n, tuple(tuple(L) for L in self._layers))


def concatenate(a: Circuit, b: Circuit, qubit_map: Sequence[int] | Mapping[int, int] | None = None) -> Circuit:
    """Append ``b``'s layers after ``a``'s, relabelling ``b`` through ``qubit_map``.

    No layer fusion happens here; see :meth:`Circuit.compact`.
    """
    m = _as_map(qubit_map if qubit_map is not None else range(b.q), b.q)
    q = max(a.q, max(m.values(), default=-1) + 1)
    n = max(a.n, max((m[i] + 1 for i in range(b.n)), default=0))
    mapped = b.remap(m, q, n)
    head = Circuit(q, n, a.layers)
    return Circuit(q, n, head.layers + mapped.layers)


# -- parity tracking ----------------------------------------------------------


@dataclass(frozen=True)
class ParityState:
    """Bitmask per qubit of the variables whose XOR the qubit currently holds."""

    masks: tuple[int, ...]

    @classmethod
    def initial(cls, q: int, n: int) -> ParityState:
        return cls(tuple((1 << i) if i < n else 0 for i in range(q)))

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable[int]]) -> ParityState:
        return cls(tuple(monomial_mask(s) for s in sets))

    def sets(self) -> tuple[Monomial, ...]:
        return tuple(mask_monomial(m) for m in self.masks)

    def holds(self, qubit: int, monomial: Iterable[int]) -> bool:
        return self.masks[qubit] == monomial_mask(monomial)


def apply_layer(state: ParityState, layer: Iterable[Gate]) -> ParityState:
    """CNOT(i->j) sets S_j <- S_j xor S_i; rotations leave the state alone."""
    masks = list(state.masks)
    seen: set[int] = set()
    cnots = []
    for g in layer:
        for qb in g.qubits:
            if qb in seen:
                raise CircuitError(f"qubit {qb} acted on twice in one layer")
            seen.add(qb)
        if isinstance(g, CNOT):
            cnots.append(g)
    # controls are read before any target is written; disjointness makes this order-free
    for g in cnots:
        masks[g.target] ^= state.masks[g.control]
    return ParityState(tuple(masks))


def final_parity(c: Circuit) -> ParityState:
    state = ParityState.initial(c.q, c.n)
    for L in c.layers:
        state = apply_layer(state, L)
    return state


# -- OpenQASM ------------------------------------------------------------------


def _fmt_angle(x: float) -> str:
    return repr(float(x))


def emit_qasm(c: Circuit, gamma: float = 1.0, barriers: bool = False) -> str:
    """OpenQASM 2.0 text; a rotation tagged alpha becomes ``rz(2*gamma*alpha)``.

    exp(-i theta Z) equals Rz(2 theta) up to global phase.
    """
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.q}];"]
    body = [L for L in c.layers if L]
    for k, L in enumerate(body):
        for g in L:
            if isinstance(g, CNOT):
                lines.append(f"cx q[{g.control}],q[{g.target}];")
            else:
                lines.append(f"rz({_fmt_angle(2.0 * gamma * g.alpha)}) q[{g.qubit}];")
        if barriers and k + 1 < len(body):
            lines.append("barrier q;")
    return "\n".join(lines) + "\n"
