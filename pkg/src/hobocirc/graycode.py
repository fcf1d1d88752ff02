"""Gray-code baseline: every rotation happens on one shared ancilla.

For a degree-D monomial the ancilla walks the nonzero reflected-binary
codewords, one CNOT per flip, so a block costs 2**(D+1) - 1 layers and
blocks for different monomials run back to back.
"""

from __future__ import annotations

from .circuit import CNOT, Circuit, CircuitBuilder, Rotation
from .polynomial import HoboPolynomial, Monomial


def gray_walk(degree: int) -> list[Monomial]:
    """Nonzero codewords of the reflected binary code on ``degree`` bits, as index tuples.

    >>> gray_walk(2)
    [(0,), (0, 1), (1,)]
    """
    if degree < 1:
        raise ValueError("Gray walk needs degree >= 1")
    out = []
    for i in range(1, 1 << degree):
        g = i ^ (i >> 1)
        out.append(tuple(b for b in range(degree) if g >> b & 1))
    return out


def gray_block(monomial: Monomial, coeff: float, ancilla: int) -> list:
    """Gate sequence (strictly serial on the ancilla) for one monomial."""
    mono = tuple(sorted(monomial))
    d = len(mono)
    scale = coeff / (1 << d)
    walk = gray_walk(d)
    gates: list = [CNOT(mono[walk[0][0]], ancilla)]
    prev = set(walk[0])
    for k, sub in enumerate(walk):
        if k:
            (flip,) = prev.symmetric_difference(sub)
            gates.append(CNOT(mono[flip], ancilla))
            prev = set(sub)
        sign = -1.0 if len(sub) % 2 else 1.0
        gates.append(Rotation(ancilla, tuple(mono[i] for i in sub), sign * scale))
    gates.append(CNOT(mono[walk[-1][0]], ancilla))
    return gates


def compile_gray(f: HoboPolynomial, strict: bool = True) -> Circuit:
    """Concatenate one Gray-code block per monomial on a single ancilla (qubit n).

    With ``strict=False`` degree-1 monomials skip the ancilla and become a
    bare rotation on their own qubit.
    """
    anc = f.n
    builder = CircuitBuilder(f.n + 1, f.n)
    for mono, coeff in f.terms:
        if not mono:
            continue
        if len(mono) == 1 and not strict:
            builder.place_earliest(Rotation(mono[0], mono, -coeff / 2))
            continue
        for g in gray_block(mono, coeff, anc):
            builder.place_earliest(g)
    return builder.build()
