from __future__ import annotations

import pytest

from hobocirc.graycode import compile_gray, gray_block, gray_walk
from hobocirc.instances import monomial, poly_1, poly_2, qubo1
from hobocirc.polynomial import HoboPolynomial, expand_to_ising
from hobocirc.verify import ANGLE_SUM, check_statevector, check_symbolic


def test_walk_degree_two():
    assert gray_walk(2) == [(0,), (0, 1), (1,)]


@pytest.mark.parametrize("d", range(1, 9))
def test_walk_visits_every_subset_once_with_single_flips(d):
    walk = gray_walk(d)
    assert len(walk) == len(set(walk)) == 2**d - 1
    for s, t in zip(walk, walk[1:]):
        assert len(set(s) ^ set(t)) == 1


def test_walk_rejects_zero():
    with pytest.raises(ValueError):
        gray_walk(0)


@pytest.mark.parametrize("d, depth", [(3, 15), (4, 31), (5, 63), (6, 127)])
def test_single_monomial_depth(d, depth):
    c = compile_gray(monomial(d))
    assert c.depth == depth and c.q == d + 1
    assert check_symbolic(c, expand_to_ising(monomial(d)), ANGLE_SUM)


@pytest.mark.parametrize("d", range(3, 7))
def test_concatenated_depth(d):
    assert compile_gray(poly_1(d)).depth == 2 * (2 ** (d + 1) - 1)
    assert compile_gray(poly_2(d)).depth == 4 * (2 ** (d + 1) - 1)


def test_block_shape():
    gates = gray_block((0, 2), 1.0, 3)
    assert len(gates) == 7
    assert gates[0].target == 3 and gates[-1].target == 3


@pytest.mark.parametrize("f", [qubo1(), poly_1(3), HoboPolynomial(3, [((0,), 1.0), ((1, 2), -1.5), ((), 2.0)])])
def test_statevector(f):
    c = compile_gray(f)
    assert check_statevector(c, expand_to_ising(f), 0.61)


def test_linear_bypass():
    f = HoboPolynomial(2, [((0,), 1.0), ((1,), 2.0)])
    strict = compile_gray(f)
    loose = compile_gray(f, strict=False)
    assert strict.depth == 6 and loose.depth == 1
    h = expand_to_ising(f)
    assert check_statevector(loose, h, 0.3) and check_statevector(strict, h, 0.3)
