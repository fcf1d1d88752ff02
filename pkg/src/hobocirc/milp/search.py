"""Breadth-first exact search over layers, a solver-free check of CDP optima.

A search state is (parity mask per qubit, set of monomials already rotated).
Each layer picks a set of disjoint CNOTs; every qubit left idle then rotates
for any still-missing monomial it currently holds. Rotating on an idle qubit
never hurts, so this restriction keeps optimality while shrinking the
branching factor. BFS makes the first goal state found depth-optimal.
"""

from __future__ import annotations

from collections.abc import Iterator

from ..circuit import CNOT, Circuit, Rotation
from ..polynomial import IsingPolynomial, monomial_mask
from .model import CdpConfig

MAX_Q = 3
MAX_T = 8
MAX_TERMS = 7


class SearchLimitError(ValueError):
    pass


def _matchings(q: int, downward: bool) -> list[tuple[tuple[int, int], ...]]:
    """All sets of CNOTs on pairwise-disjoint qubits (including the empty set)."""
    pairs = [(i, j) for i in range(q) for j in range(q) if i != j and (not downward or i < j)]
    out: list[tuple[tuple[int, int], ...]] = []

    def rec(start: int, used: int, acc: list[tuple[int, int]]) -> None:
        out.append(tuple(acc))
        for k in range(start, len(pairs)):
            i, j = pairs[k]
            if used >> i & 1 or used >> j & 1:
                continue
            acc.append((i, j))
            rec(k + 1, used | 1 << i | 1 << j, acc)
            acc.pop()

    rec(0, 0, [])
    return out


def _successors(state, covered, matchings, masks) -> Iterator[tuple[tuple, int, tuple, tuple]]:
    q = len(state)
    for match in matchings:
        busy = 0
        new = list(state)
        for i, j in match:
            busy |= 1 << i | 1 << j
            new[j] ^= state[i]
        rots = []
        cov = covered
        for i in range(q):
            if busy >> i & 1:
                continue
            for v, mask in enumerate(masks):
                if not cov >> v & 1 and state[i] == mask:
                    cov |= 1 << v
                    rots.append((i, v))
                    break
        if not match and not rots:
            continue
        yield tuple(new), cov, match, tuple(rots)


def exact_search(h: IsingPolynomial, cfg: CdpConfig, enforce_limits: bool = True) -> Circuit | None:
    """Depth-optimal exactly-once circuit within cfg.q qubits and cfg.T layers, or None."""
    if not h.terms:
        raise ValueError("Hamiltonian has no non-constant terms")
    if enforce_limits and (cfg.q > MAX_Q or cfg.T > MAX_T or len(h.terms) > MAX_TERMS):
        raise SearchLimitError(
            f"exact search is limited to q <= {MAX_Q}, T <= {MAX_T}, |P_H| <= {MAX_TERMS}"
            f" (got q={cfg.q}, T={cfg.T}, |P_H|={len(h.terms)})"
        )
    if cfg.q < h.n:
        raise ValueError(f"qubit budget q={cfg.q} is below n={h.n}")
    q, n = cfg.q, h.n
    masks = [monomial_mask(m) for m in h.monomials]
    init = tuple((1 << i) if i < n else 0 for i in range(q))
    full = (1 << len(masks)) - 1
    matchings = _matchings(q, cfg.downward_only)

    parent: dict[tuple, tuple | None] = {(init, 0): None}
    frontier = [(init, 0)]
    goal = None
    for _depth in range(cfg.T):
        nxt = []
        for node in frontier:
            state, cov = node
            for new, ncov, match, rots in _successors(state, cov, matchings, masks):
                key = (new, ncov)
                if key in parent:
                    continue
                parent[key] = (node, match, rots)
                if new == init and ncov == full:
                    goal = key
                    break
                nxt.append(key)
            if goal:
                break
        if goal or not nxt:
            break
        frontier = nxt
    if goal is None:
        return None

    layers = []
    key = goal
    alphas = h.coefficients()
    while parent[key] is not None:
        prev, match, rots = parent[key]
        gates = [CNOT(i, j) for i, j in match]
        gates += [Rotation(i, h.monomials[v], alphas[h.monomials[v]]) for i, v in rots]
        layers.append(tuple(gates))
        key = prev
    return Circuit(q, n, tuple(reversed(layers)))
