import pytest

from c2hourglass.c2engine import (Candidate, RouteInapplicable, c2_graph, c2_via_3inv, c2_via_psi,
                                  c2_via_reduction, default_start, first_degree3_vertex, kronecker,
                                  legendre_candidate, match_sequence, prefix, read_coefficient_file)
from c2hourglass.finitefield import C2Prefix, field_for_q
from c2hourglass.graph_core import Multigraph
from c2hourglass.reduction import ReductionOutcome, WeightDrop, reduce

from conftest import complete, corpus, prism, triangle, wheel


def test_psi_examples():
    assert c2_via_psi(triangle(), field_for_q(3)) == 1
    # [Psi_K4]_2 = 36 from an independent brute force
    assert c2_via_psi(complete(4), field_for_q(2)) == 1
    for g in corpus(with_decompletions=False).values():
        assert c2_via_psi(g, field_for_q(2)) in (0, 1)


def test_psi_preconditions():
    with pytest.raises(RouteInapplicable):
        c2_via_psi(Multigraph.from_pairs(2, [(0, 1), (0, 1)]), field_for_q(3))
    with pytest.raises(RouteInapplicable):
        c2_via_psi(Multigraph.from_pairs(4, [(0, 1), (0, 1), (0, 1), (2, 3)]), field_for_q(3))


@pytest.mark.parametrize("q", [2, 3, 5])
def test_three_inv_agrees_with_psi(q):
    F = field_for_q(q)
    for name, g in corpus().items():
        try:
            v = first_degree3_vertex(g)
        except RouteInapplicable:
            continue
        assert c2_via_3inv(g, v, F) == c2_via_psi(g, F), name


def test_three_inv_two_vertex_cut():
    # K4 with a path of doubled edges attached at vertices 0 and 1
    k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    g = Multigraph.from_pairs(6, k4 + [(0, 4), (4, 5), (4, 5), (5, 1)])
    for q in (3, 5):
        F = field_for_q(q)
        assert c2_via_3inv(g, 4, F) == 0 == c2_via_psi(g, F)


def test_three_inv_needs_degree_three():
    with pytest.raises(RouteInapplicable):
        c2_via_3inv(complete(5), 0, field_for_q(3))


def test_reduction_weight_drop_is_zero():
    g = wheel(4)
    out = ReductionOutcome(WeightDrop(("e1", "e2", "e3")), history=[WeightDrop(("e1", "e2", "e3"))])
    assert c2_via_reduction(g, out, field_for_q(5)) == 0
    assert c2_via_reduction(g, out, field_for_q(5), route="classical") == 0


def test_reduction_routes_on_wheel():
    g = wheel(4)
    out = reduce(g, ("e1", "e2", "e5"), strategy="greedy-search")
    for q in (2, 3, 5, 7):
        F = field_for_q(q)
        want = c2_via_psi(g, F)
        assert c2_via_reduction(g, out, F, "classical") == want
        if q > 2:
            assert c2_via_reduction(g, out, F, "quadratic") == want


def test_quadratic_route_at_q2():
    F2 = field_for_q(2)
    g = complete(5).delete_vertex(0)
    out = reduce(g, default_start(g), strategy="greedy-search")
    with pytest.raises(RouteInapplicable):
        c2_via_reduction(g, out, F2, "quadratic")
    # the prism decompletion reduces to an invariant that vanishes mod 2
    g = prism().delete_vertex(0)
    out = reduce(g, default_start(g), strategy="greedy-search")
    assert c2_via_reduction(g, out, F2, "quadratic") == 0 == c2_via_psi(g, F2)


def test_h1_guard():
    out = reduce(complete(5), ("e1", "e2", "e3"))
    with pytest.raises(RouteInapplicable):
        c2_via_reduction(complete(5), out, field_for_q(3))


def test_prefix_determinism():
    g = wheel(4)
    a = prefix(g, [2, 3, 5], "psi-count")
    b = prefix(g, [2, 3, 5], "psi-count", workers=2)
    assert a == b
    assert a.residues() == [c2_graph(g, field_for_q(q), "three-inv") for q in (2, 3, 5)]
    with pytest.raises(ValueError):
        prefix(g, [3], "nonsense")


def test_kronecker():
    assert [kronecker(-4, p) for p in (2, 3, 5, 7, 11, 13)] == [0, -1, 1, -1, -1, 1]
    assert [kronecker(4, p) for p in (2, 3, 5)] == [0, 1, 1]


def test_match_sequence(data_dir):
    zeros = C2Prefix(((3, 0), (5, 0)))
    rep = match_sequence(zeros, [legendre_candidate(-4)])
    assert not rep.lines[0].consistent and rep.lines[0].first_mismatch == 3
    assert match_sequence(zeros, []).lines == []
    cand = read_coefficient_file((data_dir / "legendre_m4.csv").read_text(), "m4")
    pre = C2Prefix(((2, 0), (3, 1), (5, 4), (7, 1)))
    assert match_sequence(pre, [cand]).lines[0].consistent
    ident = match_sequence(pre, [cand], transform="identity")
    assert not ident.lines[0].consistent
    assert "consistent (4 values compared)" in match_sequence(pre, [cand]).to_text()


def test_coefficient_file_errors():
    with pytest.raises(ValueError):
        read_coefficient_file("2,1,3\n")
    with pytest.raises(ValueError):
        read_coefficient_file("x,1\n")
    c = read_coefficient_file("# comment\np,a_p\n3,2\n")
    assert c.value(3) == 2 and c.value(5) is None
    assert Candidate("x").value(3) is None
