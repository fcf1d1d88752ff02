from __future__ import annotations

import json

import pytest

from hobocirc.circuit import CNOT, Circuit, Rotation
from hobocirc.polynomial import IsingPolynomial, expand_to_ising, parse_polynomial
from hobocirc.template import compile_greedy, monomial_circuit
from hobocirc.verify import (
    ANGLE_SUM,
    EXACTLY_ONCE,
    check_statevector,
    check_symbolic,
    ising_phases,
    random_gammas,
    verify_all,
)


@pytest.fixture
def quad():
    f = parse_polynomial("3 x1 x2")
    return f, expand_to_ising(f), monomial_circuit((0, 1), 3.0, 2, 2)


def test_good_circuit_passes(quad):
    _, h, c = quad
    rep = check_symbolic(c, h, EXACTLY_ONCE)
    assert rep and rep.first_failure is None
    assert rep.rotation_ledger == h.coefficients()
    assert check_statevector(c, h, 0.9)


def test_wrong_tag_reports_layer_and_qubit(quad):
    _, h, c = quad
    layers = list(c.layers)
    layers[2] = (Rotation(1, (1,), 0.75),)
    rep = check_symbolic(Circuit(2, 2, layers), h, ANGLE_SUM)
    assert not rep
    layer, qubit, reason = rep.first_failure
    assert (layer, qubit) == (2, 1) and "holds" in reason
    assert rep.to_dict()["first_failure"]["layer"] == 3


def test_missing_uncompute(quad):
    _, h, c = quad
    rep = check_symbolic(Circuit(2, 2, c.layers[:3]), h)
    assert "uncompute" in rep.first_failure[2]


def test_duplicate_rejected_only_in_exactly_once():
    f = parse_polynomial("x1 x2 + x2 x3")
    h = expand_to_ising(f)
    c = compile_greedy(f)
    assert not check_symbolic(c, h, EXACTLY_ONCE)
    assert check_symbolic(c, h, ANGLE_SUM)


def test_wrong_angle(quad):
    _, h, c = quad
    layers = [tuple(Rotation(g.qubit, g.monomial, g.alpha * 2) if isinstance(g, Rotation) else g for g in L) for L in c.layers]
    bad = Circuit(2, 2, layers)
    assert not check_symbolic(bad, h, EXACTLY_ONCE)
    assert not check_symbolic(bad, h, ANGLE_SUM)
    assert not check_statevector(bad, h, 0.5)


def test_n_mismatch_is_a_failure_not_exception(quad):
    _, _, c = quad
    h3 = IsingPolynomial(3, [((0,), 1.0)])
    assert not check_symbolic(c, h3)
    assert not check_statevector(c, h3)


def test_unknown_mode(quad):
    _, h, c = quad
    with pytest.raises(ValueError):
        check_symbolic(c, h, "fuzzy")


def test_statevector_detects_dirty_ancilla():
    h = IsingPolynomial(1, [((0,), 0.5)])
    c = Circuit(2, 1, [[Rotation(0, (0,), 0.5)], [CNOT(0, 1)]])
    rep = check_statevector(c, h, 0.3)
    assert not rep and "not diagonal" in rep.first_failure[2]


def test_statevector_size_limit():
    c = Circuit(15, 15, [])
    with pytest.raises(ValueError):
        check_statevector(c, IsingPolynomial(15, []))


def test_empty_matches_zero():
    h = expand_to_ising(parse_polynomial("0", n=2))
    c = Circuit(2, 2, [])
    assert all(verify_all(c, h))


def test_global_phase_ignored():
    # constant term of H only shifts the global phase
    h = IsingPolynomial(1, [((0,), 0.25)], constant=7.0)
    c = Circuit(1, 1, [[Rotation(0, (0,), 0.25)]])
    assert check_statevector(c, h, 1.3)


def test_ising_phases_oracle_by_hand():
    h = IsingPolynomial(2, [((0, 1), 1.0)])
    # labels 00, 01, 10, 11 -> Z1Z2 = +1, -1, -1, +1
    assert list(ising_phases(h, 1.0)) == [-1.0, 1.0, 1.0, -1.0]


def test_report_json(quad):
    _, h, c = quad
    data = json.loads(check_symbolic(c, h).to_json())
    assert data["passed"] and {"monomial": [1, 2], "alpha": 0.75} in data["ledger"]


def test_random_gammas_seeded():
    assert random_gammas(3, 1) == random_gammas(3, 1)
    assert random_gammas(3, 1) != random_gammas(3, 2)
