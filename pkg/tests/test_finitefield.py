import itertools
import random

import pytest

from c2hourglass.finitefield import (BudgetExceeded, C2Prefix, FieldSpec, FqElement, build_field, field_for_q,
                                     legendre_sum, legendre_symbol, naive_legendre_sum, naive_point_count,
                                     point_count)
from c2hourglass.graphpoly import kirchhoff
from c2hourglass.polyring import IntPoly, poly

from conftest import complete, wheel

SMALL_Q = [2, 3, 4, 5, 7, 8, 9]
ODD_Q = [3, 5, 7, 9]


def rand_poly(rng, names, nterms=4, maxdeg=2):
    d = {}
    for _ in range(nterms):
        mono = tuple((v, rng.randint(0, maxdeg)) for v in names)
        d[mono] = d.get(mono, 0) + rng.randint(-3, 3)
    return IntPoly.from_dict(d)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 25, 27])
def test_field_axioms(q):
    F = field_for_q(q)
    els = range(q)
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        assert F.mul(a, 1) == a
        if a:
            assert F.mul(a, F.inv(a)) == 1
        assert F.pow(a, q) == a
    step = 1 if q <= 9 else 5
    for a, b, c in itertools.product(els[::step], repeat=3):
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))


def test_build_field():
    assert build_field(3, 2).modulus == (1, 0, 1)
    assert build_field(2, 1).q == 2
    with pytest.raises(ValueError):
        build_field(4, 1)
    with pytest.raises(ValueError):
        FieldSpec(3, 2, (2, 0, 1))  # x^2 + 2 = (x-1)(x+1) over F3
    with pytest.raises(ValueError):
        field_for_q(6)
    with pytest.raises(ValueError):
        field_for_q(64)


def test_elements():
    F = field_for_q(9)
    x = F.element(4)
    assert x * x.inverse() == 1
    assert x ** 9 == x
    assert len(F.elements()) == 9
    assert (x - x) == 0 and (x / x) == 1


def test_legendre_symbol_examples():
    assert legendre_symbol(2, field_for_q(3)) == -1
    assert legendre_symbol(0, field_for_q(7)) == 0
    with pytest.raises(ValueError):
        legendre_symbol(1, field_for_q(4))


@pytest.mark.parametrize("q", [3, 5, 7, 9, 25, 27])
def test_legendre_symbol_definition(q):
    F = field_for_q(q)
    squares = {}
    for x in range(q):
        s = F.mul(x, x)
        squares[s] = squares.get(s, 0) + 1
    # plain ints are read as integers mod p, so field elements are passed by code
    el = [FqElement(F, c) for c in range(q)]
    for a in range(q):
        assert legendre_symbol(el[a], F) == squares.get(a, 0) - 1
        if a:
            assert legendre_symbol(el[a] * el[a], F) == 1
        for b in range(q):
            assert legendre_symbol(el[a] * el[b], F) == legendre_symbol(el[a], F) * legendre_symbol(el[b], F)


def test_point_count_examples():
    assert point_count(poly("a1 + a2"), field_for_q(3)) == 3
    # frozen from a standalone spanning-tree brute force
    assert point_count(kirchhoff(complete(4)), field_for_q(2)) == 36
    assert point_count(kirchhoff(complete(4)), field_for_q(3)) == 261


def test_legendre_sum_examples():
    F = field_for_q(5)
    assert legendre_sum(IntPoly.const(2), F) == -1
    assert legendre_sum(poly("a^2"), F) == 4
    assert legendre_sum(poly("a^3 + a*b^2 - b^3"), F) == 0
    with pytest.raises(ValueError):
        legendre_sum(poly("a"), field_for_q(2))


@pytest.mark.parametrize("q", SMALL_Q)
def test_counts_match_naive(q):
    F = field_for_q(q)
    rng = random.Random(q)
    for _ in range(8):
        p = rand_poly(rng, ["a", "b", "c"])
        assert point_count(p, F) == naive_point_count(p, F)
        assert point_count(p, F, accel=False) == naive_point_count(p, F)


@pytest.mark.parametrize("q", ODD_Q)
def test_legendre_accel_matches_naive(q):
    F = field_for_q(q)
    rng = random.Random(10 + q)
    for _ in range(8):
        fs = [(rand_poly(rng, ["a", "b", "c"]), rng.randint(1, 2)) for _ in range(2)]
        want = naive_legendre_sum(fs, F)
        assert legendre_sum(fs, F, accel="none") == want
        assert legendre_sum(fs, F, accel="quadratic-tail") == want


@pytest.mark.parametrize("q", ODD_Q)
def test_square_sum_identity(q):
    F = field_for_q(q)
    rng = random.Random(20 + q)
    for _ in range(6):
        p = rand_poly(rng, ["a", "b", "c"])
        n = 3
        assert legendre_sum([(p, 2)], F, ["a", "b", "c"]) == q**n - point_count(p, F, ["a", "b", "c"])
        assert point_count(p, F, ["a", "b", "c"]) % q == (-legendre_sum([(p, 2)], F, ["a", "b", "c"])) % q


@pytest.mark.parametrize("q", ODD_Q)
def test_odd_degree_homogeneous_vanishes(q):
    F = field_for_q(q)
    for text in ["a", "a*b*c", "a^3 + b^2*c - a*b*c", "a^2*b + c^3 + 2*a*b*c"]:
        assert legendre_sum(poly(text), F) == 0


@pytest.mark.parametrize("q", [3, 5, 7])
def test_scaling(q):
    F = field_for_q(q)
    p = poly("a^2*b + b^2*c - a*c^2 + a*b*c")  # homogeneous of degree 3
    for s in range(1, q):
        terms = {}
        for exps, c in p.items():
            terms[tuple(zip(p.vars, exps))] = c * s ** sum(exps)
        scaled = IntPoly.from_dict(terms)
        assert legendre_sum(scaled, F) == legendre_symbol(s, F) ** 3 * legendre_sum(p, F)


def test_kirchhoff_divisible_by_q_squared():
    for g in [complete(4), wheel(4)]:
        for q in [2, 3, 4, 5]:
            assert point_count(kirchhoff(g), field_for_q(q)) % (q * q) == 0


def test_workers_are_deterministic():
    F = field_for_q(5)
    p = kirchhoff(wheel(4))
    assert point_count(p, F, workers=2) == point_count(p, F, workers=1)


def test_budget():
    with pytest.raises(BudgetExceeded):
        point_count(kirchhoff(wheel(5)), field_for_q(7), budget=1000)


def test_prefix_validation():
    pre = C2Prefix(((2, 0), (3, 2)))
    assert pre.negated() == [0, 1]
    assert pre.to_csv() == "q,residue,neg_residue\n2,0,0\n3,2,1\n"
    with pytest.raises(ValueError):
        C2Prefix(((3, 3),))
