"""Synthetic benchmark instances.

* ``monomialD``: x1 x2 ... xD.
* ``polyD-1``: two degree-D monomials on n = D+1 variables, {1..D} and
  {2..D+1}, overlapping in D-1 variables.
* ``polyD-2``: four degree-D monomials on n = D+2 variables, the three
  windows {1..D}, {2..D+1}, {3..D+2} plus the wrap-around {1} + {4..D+2}.
  Every pair overlaps, so the greedy scheduler serializes all four blocks.
* ``qubo1``: weighted 4-cycle plus one chord (n = 4, five quadratic terms).
* ``qubo2``: weighted 6-cycle plus four chords (n = 6, ten quadratic terms).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .polynomial import HoboPolynomial, format_polynomial, parse_polynomial


def monomial(d: int) -> HoboPolynomial:
    return HoboPolynomial(d, [(range(d), 1.0)])


def poly_1(d: int) -> HoboPolynomial:
    return HoboPolynomial(d + 1, [(range(0, d), 1.0), (range(1, d + 1), 1.0)])


def poly_2(d: int) -> HoboPolynomial:
    n = d + 2
    terms = [
        (range(0, d), 1.0),
        (range(1, d + 1), 1.0),
        (range(2, d + 2), 1.0),
        ([0, *range(3, n)], 1.0),
    ]
    return HoboPolynomial(n, terms)


def qubo1() -> HoboPolynomial:
    edges = {(0, 1): 1.0, (1, 2): -2.0, (2, 3): 1.5, (0, 3): -1.0, (0, 2): 0.5}
    return HoboPolynomial(4, list(edges.items()))


def qubo2() -> HoboPolynomial:
    ring = [((i, (i + 1) % 6), 1.0 + 0.25 * i) for i in range(6)]
    chords = [((0, 3), -1.0), ((1, 4), 0.75), ((2, 5), -0.5), ((0, 2), 2.0)]
    return HoboPolynomial(6, ring + chords)


def catalogue() -> dict[str, HoboPolynomial]:
    out = {"qubo1": qubo1(), "qubo2": qubo2()}
    for d in range(3, 7):
        out[f"monomial{d}"] = monomial(d)
        out[f"poly{d}-1"] = poly_1(d)
        out[f"poly{d}-2"] = poly_2(d)
    return out


def write_instances(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, f in catalogue().items():
        p = directory / f"{name}.hobo"
        p.write_text(format_polynomial(f) + "\n")
        paths.append(p)
    return paths


def data_dir() -> Path:
    return Path(str(resources.files("hobocirc") / "data" / "instances"))


def load(name: str) -> HoboPolynomial:
    return parse_polynomial((data_dir() / f"{name}.hobo").read_text())
