"""Kirchhoff, Dodgson and spanning forest polynomials of labeled multigraphs.

Edge variables are named by edge labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import lcm
from typing import Iterable, Sequence

from .graph_core import ZERO, Multigraph, _UnionFind, incidence
from .polyring import IntPoly, det_polynomial

ENUMERATION_MAX_EDGES = 16
# kirchhoff() cross-checks its two routes automatically up to this size
AUTO_CHECK_MAX_EDGES = 10


class InternalCheckError(AssertionError):
    """Two independent computations of the same quantity disagreed."""


@dataclass(frozen=True)
class DodgsonSpec:
    I: tuple[str, ...] = ()
    J: tuple[str, ...] = ()
    K: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("I", "J", "K"):
            vals = tuple(getattr(self, name))
            if len(set(vals)) != len(vals):
                raise ValueError(f"repeated edge in {name}")
            object.__setattr__(self, name, vals)
        if len(self.I) != len(self.J):
            raise ValueError("|I| must equal |J|")


@dataclass(frozen=True)
class VertexPartition:
    parts: tuple[frozenset[int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        parts = tuple(frozenset(p) for p in self.parts)
        seen: set[int] = set()
        for p in parts:
            if not p:
                raise ValueError("empty part")
            if seen & p:
                raise ValueError("parts overlap")
            seen |= p
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> VertexPartition:
        """Parse ``{0,3}{1,2}``."""
        s = text.replace(" ", "")
        parts = []
        while s:
            if not s.startswith("{") or "}" not in s:
                raise ValueError(f"malformed partition {text!r}")
            body, s = s[1:].split("}", 1)
            parts.append({int(x) for x in body.split(",") if x})
        return cls(tuple(parts))

    @property
    def support(self) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for p in self.parts:
            out |= p
        return out


def _edge_var(label: str) -> IntPoly:
    return IntPoly.var(label)


# ---------------------------------------------------------------------------
# Kirchhoff


def expanded_laplacian(g: Multigraph, dropped_vertex: int | None = None) -> list[list[IntPoly]]:
    """[[Lambda, E^T], [E, 0]] with Lambda the diagonal of edge variables."""
    E = incidence(g, dropped_vertex)
    m = len(g.edges)
    r = len(E)
    size = m + r
    zero = IntPoly.const(0)
    consts = {c: IntPoly.const(c) for c in (-1, 1)}
    M = [[zero] * size for _ in range(size)]
    for j, (_, _, label) in enumerate(g.edges):
        M[j][j] = _edge_var(label)
    for i in range(r):
        for j in range(m):
            c = E[i][j]
            if c:
                M[m + i][j] = consts[c]
                M[j][m + i] = consts[c]
    return M


def kirchhoff_det(g: Multigraph) -> IntPoly:
    if not g.is_connected():
        raise ValueError("graph is disconnected")
    d = det_polynomial(expanded_laplacian(g))
    return -d if (g.vertex_count - 1) % 2 else d


def spanning_trees(g: Multigraph) -> Iterable[tuple[int, ...]]:
    """Edge-index sets of spanning trees (brute force over subsets)."""
    n = g.vertex_count
    ends = [(t, h) for t, h, _ in g.edges]
    for sub in combinations(range(len(ends)), n - 1):
        uf = _UnionFind(n)
        ok = True
        for j in sub:
            if not uf.union(*ends[j]):
                ok = False
                break
        if ok:
            yield sub


def kirchhoff_trees(g: Multigraph) -> IntPoly:
    if not g.is_connected():
        raise ValueError("graph is disconnected")
    if len(g.edges) > ENUMERATION_MAX_EDGES:
        raise ValueError("too many edges for tree enumeration")
    labels = g.labels
    d: dict = {}
    for tree in spanning_trees(g):
        inside = set(tree)
        mono = tuple((labels[j], 1) for j in range(len(labels)) if j not in inside)
        d[mono] = d.get(mono, 0) + 1
    return IntPoly.from_dict(d)


def kirchhoff(g: Multigraph, check: bool | None = None) -> IntPoly:
    """Kirchhoff polynomial: sum over spanning trees of the product of non-tree edge variables.

    Computed from the expanded Laplacian; with ``check`` (default: small
    graphs only) the spanning tree enumeration is run as well and compared.
    """
    psi = kirchhoff_det(g)
    if check is None:
        check = len(g.edges) <= AUTO_CHECK_MAX_EDGES
    if check and kirchhoff_trees(g) != psi:
        raise InternalCheckError("Kirchhoff polynomial: tree enumeration disagrees with determinant")
    return psi


# ---------------------------------------------------------------------------
# Dodgson


def dodgson(g: Multigraph, spec: DodgsonSpec | None = None, *, I=(), J=(), K=()) -> IntPoly:
    """Dodgson polynomial Psi^{I,J}_{G,K}.

    For I == J the sign is (-1)^{|V|-1} det, which makes it a positive sum of
    monomials.  For I != J we return the determinant of the minor with rows I
    and columns J removed, remaining rows and columns kept in edge order.
    """
    if spec is None:
        spec = DodgsonSpec(tuple(I), tuple(J), tuple(K))
    labels = g.labels
    for e in spec.I + spec.J + spec.K:
        if e not in labels:
            raise ValueError(f"unknown edge {e!r}")
    if not g.is_connected():
        raise ValueError("graph is disconnected")
    M = expanded_laplacian(g)
    pos = {l: i for i, l in enumerate(labels)}
    if spec.K:
        zero = IntPoly.const(0)
        for k in spec.K:
            j = pos[k]
            M[j][j] = zero
    drop_r = {pos[e] for e in spec.I}
    drop_c = {pos[e] for e in spec.J}
    minor = [[x for c, x in enumerate(row) if c not in drop_c] for r, row in enumerate(M) if r not in drop_r]
    d = det_polynomial(minor)
    if set(spec.I) == set(spec.J) and (g.vertex_count - 1) % 2:
        d = -d
    return d


def dodgson_by_minors(g: Multigraph, I: Sequence[str], K: Sequence[str] = ()) -> IntPoly:
    """Psi^{I,I}_{G,K} as the Kirchhoff polynomial of (G minus I) contracted by K."""
    h = g.delete_many(I)
    for k in K:
        h = h.contract(k)
        if h is ZERO:
            return IntPoly.const(0)
    if not h.is_connected():
        return IntPoly.const(0)
    return kirchhoff_det(h)


def is_cut(g: Multigraph, edges: Iterable[str]) -> bool:
    return not g.delete_many(edges).is_connected()


def contains_cycle(g: Multigraph, edges: Iterable[str]) -> bool:
    uf = _UnionFind(g.vertex_count)
    for e in set(edges):
        t, h, _ = g.edge(e)
        if not uf.union(t, h):
            return True
    return False


def dodgson_vanishes(g: Multigraph, spec: DodgsonSpec) -> bool:
    """Sufficient combinatorial conditions for a Dodgson polynomial to vanish."""
    I, J, K = set(spec.I), set(spec.J), set(spec.K)
    return (is_cut(g, I) or is_cut(g, J)
            or contains_cycle(g, (I | K) - J) or contains_cycle(g, (J | K) - I))


# ---------------------------------------------------------------------------
# spanning forests


def _check_partition(g: Multigraph, P: VertexPartition) -> None:
    for p in P.parts:
        for v in p:
            if not 0 <= v < g.vertex_count:
                raise ValueError(f"vertex {v} out of range")
    if not P.parts:
        raise ValueError("empty partition")


def spanning_forest_enum(g: Multigraph, P: VertexPartition) -> IntPoly:
    _check_partition(g, P)
    if len(g.edges) > ENUMERATION_MAX_EDGES:
        raise ValueError("too many edges for forest enumeration")
    n = g.vertex_count
    k = len(P.parts)
    ends = [(t, h) for t, h, _ in g.edges]
    labels = g.labels
    d: dict = {}
    if n - k < 0:
        return IntPoly.const(0)
    for sub in combinations(range(len(ends)), n - k):
        uf = _UnionFind(n)
        if not all(uf.union(*ends[j]) for j in sub):
            continue
        roots = []
        ok = True
        for p in P.parts:
            rs = {uf.find(v) for v in p}
            if len(rs) != 1:
                ok = False
                break
            roots.append(rs.pop())
        if not ok or len(set(roots)) != k:
            continue
        inside = set(sub)
        mono = tuple((labels[j], 1) for j in range(len(labels)) if j not in inside)
        d[mono] = d.get(mono, 0) + 1
    return IntPoly.from_dict(d)


def set_partitions(items: Sequence[int]) -> list[tuple[frozenset[int], ...]]:
    items = list(items)
    if not items:
        return [()]
    first, rest = items[0], items[1:]
    out = []
    for sub in set_partitions(rest):
        out.append((frozenset([first]),) + sub)
        for i in range(len(sub)):
            out.append(sub[:i] + (sub[i] | {first},) + sub[i + 1:])
    return [tuple(sorted(p, key=sorted)) for p in out]


def _tree_incidence(R, Q) -> int:
    """1 if gluing the blocks of R along the blocks of Q forms a tree."""
    S = sum(len(r) for r in R)
    if len(R) + len(Q) - 1 != S:
        return 0
    uf = _UnionFind(len(R) + len(Q))
    for i, r in enumerate(R):
        for j, q in enumerate(Q):
            c = len(r & q)
            if c > 1:
                return 0
            if c == 1 and not uf.union(i, len(R) + j):
                return 0
    return 1


@lru_cache(maxsize=None)
def _gluing_rref(n: int):
    """Row reduction of the R/Q tree-gluing matrix over set partitions of range(n).

    Returns (partitions, reduced rows, transform, pivot columns) with
    transform @ C = reduced.
    """
    parts = set_partitions(range(n))
    size = len(parts)
    A = [[Fraction(_tree_incidence(R, Q)) for Q in parts] + [Fraction(int(i == j)) for j in range(size)]
         for i, R in enumerate(parts)]
    pivots = []
    r = 0
    for c in range(size):
        piv = next((i for i in range(r, size) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(size):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return parts, [row[:size] for row in A], [row[size:] for row in A], pivots


def quotient_coefficients(n: int, target) -> list[Fraction] | None:
    """Coefficients y with Phi^target = sum_Q y_Q Psi_{G/Q}, or None if no such combination exists."""
    parts, red, T, pivots = _gluing_rref(n)
    t = parts.index(target)
    rhs = [row[t] for row in T]
    rank = len(pivots)
    if any(rhs[i] for i in range(rank, len(parts))):
        return None
    y = [Fraction(0)] * len(parts)
    for i, c in enumerate(pivots):
        y[c] = rhs[i]
    return y


def spanning_forest_det(g: Multigraph, P: VertexPartition) -> IntPoly:
    """Spanning forest polynomial from Kirchhoff polynomials of identified-vertex graphs.

    For partitions R, Q of the marked vertex set S, the Kirchhoff polynomial of
    G with each block of Q identified equals the sum of forest polynomials of
    those R whose trees glue along Q into a single tree.  Solving that linear
    system gives Phi^P whenever P lies in its row space; this holds for all
    partitions of up to three marked vertices but not for every partition of
    four or more (then ValueError is raised).
    """
    _check_partition(g, P)
    S = sorted(P.support)
    idx = {v: i for i, v in enumerate(S)}
    target = tuple(sorted((frozenset(idx[v] for v in p) for p in P.parts), key=sorted))
    row = quotient_coefficients(len(S), target)
    if row is None:
        raise ValueError("partition is not determined by quotient Kirchhoff polynomials")
    parts = _gluing_rref(len(S))[0]
    den = 1
    for x in row:
        den = lcm(den, x.denominator)
    acc = IntPoly.const(0)
    for coeff, Q in zip(row, parts):
        if not coeff:
            continue
        h = g.quotient([S[i] for i in q] for q in Q)
        if h.is_connected():
            acc = acc + kirchhoff_det(h).scale(int(coeff * den))
    return acc.exact_div_int(den)


def spanning_forest_dc(g: Multigraph, P: VertexPartition) -> IntPoly:
    """Deletion-contraction recursion; exponential, used when the quotient route cannot apply."""
    _check_partition(g, P)
    owner = {v: i for i, p in enumerate(P.parts) for v in p}
    return _forest_dc(g.vertex_count, [(t, h, l) for t, h, l in g.edges], owner, len(P.parts))


def _forest_dc(n, edges, owner, k) -> IntPoly:
    if not edges:
        # forest = no edges: every vertex is its own tree
        if n != k or len(set(owner.values())) != k or len(owner) != n:
            return IntPoly.const(0)
        return IntPoly.const(1)
    t, h, l = edges[-1]
    rest = edges[:-1]
    x = IntPoly.var(l)
    out = x * _forest_dc(n, rest, owner, k)
    if t == h:
        return out
    ot, oh = owner.get(t), owner.get(h)
    if ot is not None and oh is not None and ot != oh:
        return out
    keep, gone = min(t, h), max(t, h)

    def m(v):
        if v == gone:
            v = keep
        return v - 1 if v > gone else v

    new_owner = {}
    for v, i in owner.items():
        new_owner[m(v)] = i
    new_edges = [(m(a), m(b), lab) for a, b, lab in rest]
    return out + _forest_dc(n - 1, new_edges, new_owner, k)


def spanning_forest(g: Multigraph, P: VertexPartition, method: str = "auto") -> IntPoly:
    """Sum over spanning forests with one tree per part, each tree holding its part."""
    if method == "enum" or (method == "auto" and len(g.edges) <= 12):
        return spanning_forest_enum(g, P)
    if method == "dc":
        return spanning_forest_dc(g, P)
    try:
        return spanning_forest_det(g, P)
    except ValueError:
        if method == "det":
            raise
        return spanning_forest_dc(g, P)


# ---------------------------------------------------------------------------
# 2-sums


@dataclass(frozen=True)
class TwoSumReport:
    graph: Multigraph
    lhs: IntPoly
    rhs: IntPoly

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def two_sum(g1: Multigraph, e1: str, g2: Multigraph, e2: str) -> tuple[Multigraph, tuple[int, int], tuple[int, int]]:
    """Glue G1 minus e1 to G2 minus e2 along the endpoints of e1 and e2.

    Returns the glued graph and the endpoint pairs of e1 in G1 and e2 in G2.
    Vertices of G2 are shifted by |V(G1)| and then tail(e2)->tail(e1),
    head(e2)->head(e1).
    """
    t1, h1, _ = g1.edge(e1)
    t2, h2, _ = g2.edge(e2)
    if t1 == h1 or t2 == h2:
        raise ValueError("2-sum along a self-loop")
    if set(g1.labels) & set(g2.labels):
        raise ValueError("edge labels of the summands must be disjoint")
    n1 = g1.vertex_count
    mapping = {}
    k = n1
    for v in range(g2.vertex_count):
        if v == t2:
            mapping[v] = t1
        elif v == h2:
            mapping[v] = h1
        else:
            mapping[v] = k
            k += 1
    edges = [e for e in g1.edges if e[2] != e1]
    edges += [(mapping[t], mapping[h], l) for t, h, l in g2.edges if l != e2]
    return Multigraph(k, tuple(edges)), (t1, h1), (t2, h2)


def two_sum_check(g1: Multigraph, e1: str, g2: Multigraph, e2: str) -> TwoSumReport:
    g, (a1, b1), (a2, b2) = two_sum(g1, e1, g2, e2)
    lhs = kirchhoff_det(g)
    d1, d2 = g1.delete(e1), g2.delete(e2)
    phi1 = spanning_forest(d1, VertexPartition(({a1}, {b1})))
    phi2 = spanning_forest(d2, VertexPartition(({a2}, {b2})))
    psi1 = kirchhoff_det(d1) if d1.is_connected() else IntPoly.const(0)
    psi2 = kirchhoff_det(d2) if d2.is_connected() else IntPoly.const(0)
    return TwoSumReport(g, lhs, psi1 * phi2 + phi1 * psi2)
