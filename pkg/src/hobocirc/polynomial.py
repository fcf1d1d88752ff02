"""HOBO polynomials, their text format, and the binary-to-spin change of variables.

Monomials are stored as sorted tuples of 0-based variable indices. The text
format (and anything a user reads) is 1-based: ``x1`` is index 0.

Grammar::

    poly   := [header] term (("+"|"-") term)*
    header := "vars" INT ";"
    term   := [REAL] factor+ | REAL
    factor := "x" INT
"""

from __future__ import annotations

import itertools
import math
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

Monomial = tuple[int, ...]

#: Coefficients whose magnitude falls below this after merging are dropped.
ZERO_TOL = 1e-12


class PolynomialSyntaxError(ValueError):
    """Raised when polynomial text does not follow the grammar.

    ``offset`` is the byte offset of the offending token in the UTF-8 input.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


def _normalize(n: int, terms: Iterable[tuple[Iterable[int], float]]) -> tuple[tuple[Monomial, float], ...]:
    merged: dict[Monomial, float] = {}
    for mono, coeff in terms:
        key = tuple(sorted(set(mono)))
        for i in key:
            if not 0 <= i < n:
                raise ValueError(f"variable index {i + 1} outside [1..{n}]")
        merged[key] = merged.get(key, 0.0) + float(coeff)
    kept = [(m, c) for m, c in merged.items() if abs(c) > ZERO_TOL]
    kept.sort(key=lambda mc: (len(mc[0]), mc[0]))
    return tuple(kept)


def _as_pairs(terms) -> Iterable[tuple[Iterable[int], float]]:
    if isinstance(terms, Mapping):
        return terms.items()
    return terms


@dataclass(frozen=True)
class HoboPolynomial:
    """f(x) = sum_M C_M prod_{i in M} x_i over binary x.

    Construction merges duplicate monomials, collapses repeated variables
    (x_i^2 = x_i) and drops zero coefficients.
    """

    n: int
    terms: tuple[tuple[Monomial, float], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        object.__setattr__(self, "terms", _normalize(self.n, _as_pairs(self.terms)))

    @property
    def degree(self) -> int:
        return max((len(m) for m, _ in self.terms), default=0)

    @property
    def monomials(self) -> list[Monomial]:
        return [m for m, _ in self.terms]

    def coefficient(self, monomial: Iterable[int]) -> float:
        key = tuple(sorted(set(monomial)))
        return dict(self.terms).get(key, 0.0)

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        return format_polynomial(self)


@dataclass(frozen=True)
class IsingPolynomial:
    """H(Z) = constant + sum_M alpha_M prod_{i in M} Z_i.

    ``constant`` only contributes a global phase to exp(-i gamma H), so circuit
    backends ignore it; it is kept so that energies evaluate correctly.
    ``terms`` never contains the empty monomial.
    """

    n: int
    terms: tuple[tuple[Monomial, float], ...] = ()
    constant: float = 0.0

    def __post_init__(self):
        pairs = list(_as_pairs(self.terms))
        extra = sum(c for m, c in pairs if len(tuple(m)) == 0)
        pairs = [(m, c) for m, c in pairs if len(tuple(m)) > 0]
        object.__setattr__(self, "terms", _normalize(self.n, pairs))
        const = float(self.constant) + extra
        object.__setattr__(self, "constant", 0.0 if abs(const) <= ZERO_TOL else const)

    @property
    def monomials(self) -> list[Monomial]:
        return [m for m, _ in self.terms]

    @property
    def degree(self) -> int:
        return max((len(m) for m, _ in self.terms), default=0)

    def coefficients(self) -> dict[Monomial, float]:
        return dict(self.terms)

    def coefficient(self, monomial: Iterable[int]) -> float:
        return self.coefficients().get(tuple(sorted(set(monomial))), 0.0)

    def __len__(self) -> int:
        return len(self.terms)


def monomial_mask(monomial: Iterable[int]) -> int:
    """Bitmask with bit i set for every index i of the monomial."""
    mask = 0
    for i in monomial:
        mask |= 1 << i
    return mask


def mask_monomial(mask: int) -> Monomial:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def ising_terms_of_monomial(monomial: Sequence[int], coeff: float) -> list[tuple[Monomial, float]]:
    """Nonempty-subset expansion of ``coeff * prod_{i in M} (1 - Z_i)/2``.

    Subset I of M receives ``coeff * (-1)^|I| / 2^|M|``; the constant part is
    not returned.
    """
    mono = tuple(monomial)
    scale = coeff / (1 << len(mono))
    out = []
    for r in range(1, len(mono) + 1):
        sign = -1.0 if r % 2 else 1.0
        for sub in itertools.combinations(mono, r):
            out.append((sub, sign * scale))
    return out


def expand_to_ising(f: HoboPolynomial) -> IsingPolynomial:
    """Substitute x_i <- (1 - Z_i)/2 and merge like terms."""
    acc: dict[Monomial, float] = {}
    constant = 0.0
    for mono, coeff in f.terms:
        constant += coeff / (1 << len(mono))
        for sub, alpha in ising_terms_of_monomial(mono, coeff):
            acc[sub] = acc.get(sub, 0.0) + alpha
    return IsingPolynomial(f.n, acc, constant)


def evaluate_hobo(f: HoboPolynomial, x: Sequence[int]) -> float:
    if len(x) != f.n:
        raise ValueError(f"expected {f.n} bits, got {len(x)}")
    total = 0.0
    for mono, coeff in f.terms:
        if all(x[i] for i in mono):
            total += coeff
    return total


def evaluate_ising(h: IsingPolynomial, z: Sequence[int]) -> float:
    if len(z) != h.n:
        raise ValueError(f"expected {h.n} spins, got {len(z)}")
    if any(s not in (1, -1) for s in z):
        raise ValueError("spins must be +1 or -1")
    total = h.constant
    for mono, alpha in h.terms:
        prod = 1
        for i in mono:
            prod *= z[i]
        total += alpha * prod
    return total


# -- text format -------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<vars>vars\b)
  | (?P<factor>x(?P<idx>[0-9]+(?:\.[0-9]*)?))
  | (?P<real>(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)
  | (?P<sign>[+-])
  | (?P<semi>;)
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    offset: int
    value: float | int | None = field(default=None)


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    # byte offsets: the grammar is ASCII, so char and byte offsets agree up to the first non-ASCII char
    byte_of = _byte_offsets(text)
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolynomialSyntaxError(f"unexpected character {text[pos]!r}", byte_of(pos))
        kind = m.lastgroup
        if kind == "idx":
            kind = "factor"
        if kind != "ws":
            tok = _Tok(kind, m.group(0), byte_of(pos))
            if kind == "factor":
                raw = m.group("idx")
                if not raw.isdigit():
                    raise PolynomialSyntaxError(f"non-integer variable index {raw!r}", byte_of(pos))
                tok.value = int(raw)
                if tok.value == 0:
                    raise PolynomialSyntaxError("variable indices start at 1 (found x0)", byte_of(pos))
            elif kind == "real":
                tok.value = float(m.group(0))
            toks.append(tok)
        pos = m.end()
    return toks


def _byte_offsets(text: str):
    if text.isascii():
        return lambda i: i
    return lambda i: len(text[:i].encode("utf-8"))


def parse_polynomial(text: str, n: int | None = None) -> HoboPolynomial:
    """Parse polynomial text.

    The variable count comes from the ``vars N;`` header, then from the ``n``
    argument, and otherwise is the largest index seen. An index above a
    declared count is an error.

    >>> parse_polynomial("2 x1 x1 x2 - 0.5 x2").terms
    (((1,), -0.5), ((0, 1), 2.0))
    """
    toks = _tokenize(text)
    end = len(text.encode("utf-8"))
    pos = 0

    def peek() -> _Tok | None:
        return toks[pos] if pos < len(toks) else None

    def fail(msg: str, tok: _Tok | None):
        raise PolynomialSyntaxError(msg, tok.offset if tok else end)

    declared = None
    if peek() is not None and peek().kind == "vars":
        if len(toks) < 3 or toks[1].kind != "real" or not toks[1].text.isdigit():
            fail("expected integer after 'vars'", toks[1] if len(toks) > 1 else None)
        if toks[2].kind != "semi":
            fail("expected ';' after variable count", toks[2])
        declared = int(toks[1].text)
        pos = 3
    if n is not None and declared is not None and n != declared:
        raise ValueError(f"header declares {declared} variables but n={n} was requested")
    limit = declared if declared is not None else n

    terms: list[tuple[list[int], float]] = []
    sign = 1.0
    tok = peek()
    if tok is not None and tok.kind == "sign":
        sign = -1.0 if tok.text == "-" else 1.0
        pos += 1
    while True:
        tok = peek()
        if tok is None:
            fail("expected a term", None)
        coeff = 1.0
        if tok.kind == "real":
            if not math.isfinite(tok.value):
                fail(f"coefficient {tok.text!r} is not finite", tok)
            coeff = tok.value
            pos += 1
        elif tok.kind != "factor":
            fail(f"expected a coefficient or factor, found {tok.text!r}", tok)
        factors = []
        while peek() is not None and peek().kind == "factor":
            f = toks[pos]
            if limit is not None and f.value > limit:
                fail(f"variable x{f.value} exceeds declared count {limit}", f)
            factors.append(f.value - 1)
            pos += 1
        terms.append((factors, sign * coeff))
        tok = peek()
        if tok is None:
            break
        if tok.kind != "sign":
            fail(f"expected '+' or '-', found {tok.text!r}", tok)
        sign = -1.0 if tok.text == "-" else 1.0
        pos += 1

    if limit is None:
        limit = max((i + 1 for fs, _ in terms for i in fs), default=0)
    return HoboPolynomial(limit, terms)


def _format_real(c: float) -> str:
    text = repr(float(c))
    return text[:-2] if text.endswith(".0") else text


def format_polynomial(f: HoboPolynomial, header: bool = True) -> str:
    """Render ``f`` in the text grammar; ``parse_polynomial`` inverts it exactly."""
    parts: list[str] = []
    for k, (mono, coeff) in enumerate(f.terms):
        mag = abs(coeff)
        factors = " ".join(f"x{i + 1}" for i in mono)
        if not mono:
            body = _format_real(mag)
        elif mag == 1.0:
            body = factors
        else:
            body = f"{_format_real(mag)} {factors}"
        if k == 0:
            parts.append(("-" if coeff < 0 else "") + body)
        else:
            parts.append(("- " if coeff < 0 else "+ ") + body)
    body = " ".join(parts) if parts else "0"
    return f"vars {f.n}; {body}" if header else body
