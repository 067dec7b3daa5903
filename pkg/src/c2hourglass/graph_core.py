"""Labeled multigraphs with deletion, contraction and structural predicates."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence


class GraphFormatError(ValueError):
    pass


class _ZeroFlag:
    """Result of contracting a self-loop: every polynomial of it is 0."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "ZERO"

    def __bool__(self):
        return False


ZERO = _ZeroFlag()

Edge = tuple  # (tail, head, label)


@dataclass(frozen=True)
class Multigraph:
    vertex_count: int
    edges: tuple[tuple[int, int, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(t), int(h), str(l)) for t, h, l in self.edges))
        seen = set()
        for t, h, label in self.edges:
            if not (0 <= t < self.vertex_count and 0 <= h < self.vertex_count):
                raise GraphFormatError(f"edge {label}: vertex out of range")
            if label in seen:
                raise GraphFormatError(f"duplicate edge label {label}")
            seen.add(label)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]], labels: Sequence[str] | None = None,
                   prefix: str = "e") -> Multigraph:
        pairs = list(pairs)
        if labels is None:
            labels = [f"{prefix}{i + 1}" for i in range(len(pairs))]
        return cls(n, tuple((a, b, l) for (a, b), l in zip(pairs, labels)))

    # -- queries ------------------------------------------------------
    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(e[2] for e in self.edges)

    def edge(self, label: str) -> tuple[int, int, str]:
        for e in self.edges:
            if e[2] == label:
                return e
        raise KeyError(f"unknown edge label {label!r}")

    def degree(self, v: int) -> int:
        return sum((t == v) + (h == v) for t, h, _ in self.edges)

    def degrees(self) -> list[int]:
        d = [0] * self.vertex_count
        for t, h, _ in self.edges:
            d[t] += 1
            d[h] += 1
        return d

    def incident(self, v: int) -> list[str]:
        return [l for t, h, l in self.edges if t == v or h == v]

    def neighbors(self, v: int) -> list[int]:
        out = []
        for t, h, _ in self.edges:
            if t == v:
                out.append(h)
            elif h == v:
                out.append(t)
        return out

    def components(self) -> list[list[int]]:
        uf = _UnionFind(self.vertex_count)
        for t, h, _ in self.edges:
            uf.union(t, h)
        groups: dict[int, list[int]] = {}
        for v in range(self.vertex_count):
            groups.setdefault(uf.find(v), []).append(v)
        return sorted(groups.values())

    def is_connected(self) -> bool:
        return self.vertex_count <= 1 or len(self.components()) == 1

    def h1(self) -> int:
        return len(self.edges) - self.vertex_count + len(self.components())

    # -- edits --------------------------------------------------------
    def delete(self, label: str) -> Multigraph:
        self.edge(label)
        return Multigraph(self.vertex_count, tuple(e for e in self.edges if e[2] != label))

    def delete_many(self, labels: Iterable[str]) -> Multigraph:
        drop = set(labels)
        missing = drop - set(self.labels)
        if missing:
            raise KeyError(f"unknown edge labels {sorted(missing)}")
        return Multigraph(self.vertex_count, tuple(e for e in self.edges if e[2] not in drop))

    def contract(self, label: str) -> Multigraph | _ZeroFlag:
        t, h, _ = self.edge(label)
        if t == h:
            return ZERO
        keep, gone = min(t, h), max(t, h)

        def m(v):
            if v == gone:
                v = keep
            return v - 1 if v > gone else v

        edges = tuple((m(a), m(b), l) for a, b, l in self.edges if l != label)
        return Multigraph(self.vertex_count - 1, edges)

    def delete_vertex(self, v: int) -> Multigraph:
        def m(u):
            return u - 1 if u > v else u

        edges = tuple((m(a), m(b), l) for a, b, l in self.edges if a != v and b != v)
        return Multigraph(self.vertex_count - 1, edges)

    def identify(self, vs: Iterable[int]) -> Multigraph:
        """Merge a set of vertices into its smallest member."""
        return self.quotient([vs])

    def quotient(self, blocks: Iterable[Iterable[int]]) -> Multigraph:
        """Merge each block of vertices; survivors keep their relative order."""
        rep = list(range(self.vertex_count))
        for b in blocks:
            b = sorted(set(b))
            for v in b[1:]:
                rep[v] = b[0]
        newid = {}
        k = 0
        for v in range(self.vertex_count):
            if rep[v] == v:
                newid[v] = k
                k += 1
        edges = tuple((newid[rep[a]], newid[rep[b]], l) for a, b, l in self.edges)
        return Multigraph(k, edges)

    def add_edge(self, tail: int, head: int, label: str) -> Multigraph:
        return Multigraph(self.vertex_count, self.edges + ((tail, head, label),))

    def relabel_edges(self, mapping) -> Multigraph:
        return Multigraph(self.vertex_count, tuple((t, h, mapping.get(l, l)) for t, h, l in self.edges))

    def reorder_edges(self, labels: Sequence[str]) -> Multigraph:
        if sorted(labels) != sorted(self.labels):
            raise ValueError("reorder must be a permutation of the edge labels")
        return Multigraph(self.vertex_count, tuple(self.edge(l) for l in labels))


class _UnionFind:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, x):
        p = self.p
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.p[max(a, b)] = min(a, b)
            return True
        return False


# ---------------------------------------------------------------------------
# text format


def from_edge_list(text: str) -> Multigraph:
    g, _ = parse_graph_text(text)
    return g


def parse_graph_text(text: str) -> tuple[Multigraph, list[str]]:
    """Parse graph file contents; also return unrecognized extra lines (kernel headers)."""
    n = None
    edges = []
    extra = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if parts[0] != "v" or len(parts) != 2 or not parts[1].isdigit():
                raise GraphFormatError(f"line {lineno}: expected 'v N'")
            n = int(parts[1])
            continue
        if parts[0] == "e":
            if len(parts) != 4:
                raise GraphFormatError(f"line {lineno}: expected 'e LABEL TAIL HEAD'")
            try:
                t, h = int(parts[2]), int(parts[3])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: vertex indices must be integers") from None
            if not (0 <= t < n and 0 <= h < n):
                raise GraphFormatError(f"line {lineno}: vertex index out of range")
            edges.append((t, h, parts[1]))
        elif parts[0] == "x":
            extra.append(line)
        else:
            raise GraphFormatError(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise GraphFormatError("missing 'v N' line")
    return Multigraph(n, tuple(edges)), extra


def to_edge_list(g: Multigraph) -> str:
    lines = [f"v {g.vertex_count}"]
    lines += [f"e {l} {t} {h}" for t, h, l in g.edges]
    return "\n".join(lines) + "\n"


def contract(g: Multigraph, e: str):
    return g.contract(e)


def delete(g: Multigraph, e: str) -> Multigraph:
    return g.delete(e)


# ---------------------------------------------------------------------------
# incidence


def incidence(g: Multigraph, dropped_vertex: int | None = None) -> list[list[int]]:
    """Signed incidence matrix (rows = vertices except the dropped one)."""
    if not g.is_connected():
        raise ValueError("graph is disconnected")
    if dropped_vertex is None:
        dropped_vertex = g.vertex_count - 1
    rows = [v for v in range(g.vertex_count) if v != dropped_vertex]
    M = [[0] * len(g.edges) for _ in rows]
    pos = {v: i for i, v in enumerate(rows)}
    for j, (t, h, _) in enumerate(g.edges):
        if t == h:
            continue
        if t in pos:
            M[pos[t]][j] -= 1
        if h in pos:
            M[pos[h]][j] += 1
    return M


def integer_rank(M: Sequence[Sequence[int]]) -> int:
    from fractions import Fraction

    A = [[Fraction(x) for x in row] for row in M]
    rank = 0
    cols = len(A[0]) if A else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(A)) if A[r][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for r in range(len(A)):
            if r != rank and A[r][c]:
                f = A[r][c] / A[rank][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# structural predicates


@dataclass(frozen=True)
class StructuralReport:
    connected: bool
    h1: int
    is_4_regular: bool
    has_3_vertex_split: bool
    has_double_triangle: bool
    internally_6_edge_connected: bool


def structural_predicates(g: Multigraph) -> StructuralReport:
    return StructuralReport(
        connected=g.is_connected(),
        h1=g.h1(),
        is_4_regular=all(d == 4 for d in g.degrees()),
        has_3_vertex_split=has_3_vertex_split(g),
        has_double_triangle=bool(find_double_triangles(g)),
        internally_6_edge_connected=internally_6_edge_connected(g),
    )


def _simple_adjacency(g: Multigraph) -> list[set[int]]:
    adj = [set() for _ in range(g.vertex_count)]
    for t, h, _ in g.edges:
        if t != h:
            adj[t].add(h)
            adj[h].add(t)
    return adj


def has_3_vertex_split(g: Multigraph) -> bool:
    """Some 3 vertices whose removal disconnects the rest."""
    n = g.vertex_count
    if n < 5:
        return False
    adj = _simple_adjacency(g)
    for trio in combinations(range(n), 3):
        gone = set(trio)
        rest = [v for v in range(n) if v not in gone]
        seen = {rest[0]}
        stack = [rest[0]]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in gone and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) < len(rest):
            return True
    return False


def find_double_triangles(g: Multigraph) -> list[tuple[int, int, int, int]]:
    """All (a, b, c, d): triangles abc and abd sharing edge ab, c < d."""
    adj = _simple_adjacency(g)
    out = []
    for a in range(g.vertex_count):
        for b in adj[a]:
            if b <= a:
                continue
            common = sorted(adj[a] & adj[b])
            for c, d in combinations(common, 2):
                out.append((a, b, c, d))
    return out


def internally_6_edge_connected(g: Multigraph) -> bool:
    """Connected, and every edge cut with fewer than 6 edges isolates one vertex.

    Removing a superset of a cut only refines the component structure, so it
    suffices to remove every edge subset of one fixed size (4 when all degrees
    are even, since then every cut is even, else 5) and test whether the
    resulting components can be split into two groups of at least two vertices.
    """
    if not g.is_connected():
        return False
    n, m = g.vertex_count, len(g.edges)
    if n < 4:
        return True
    size = 4 if all(d % 2 == 0 for d in g.degrees()) else 5
    size = min(size, m)
    ends = [(t, h) for t, h, _ in g.edges]
    for drop in combinations(range(m), size):
        uf = _UnionFind(n)
        dropped = set(drop)
        for j, (t, h) in enumerate(ends):
            if j not in dropped:
                uf.union(t, h)
        sizes: dict[int, int] = {}
        for v in range(n):
            r = uf.find(v)
            sizes[r] = sizes.get(r, 0) + 1
        if len(sizes) < 2:
            continue
        s = sorted(sizes.values())
        if len(s) == 2:
            if s[0] >= 2:
                return False
        else:
            return False  # n >= 4 and three or more parts always regroup nontrivially
    return True


def double_triangle_reduce(g: Multigraph, which: tuple[int, int, int, int] | None = None) -> Multigraph:
    """Turn the shared vertex b of triangles (a,b,c), (a,b,d) into a crossing.

    The edges b-c and b-d at b are replaced by one edge c-d and the edges at b
    leaving the double triangle are re-attached to a; the edge a-b disappears.
    """
    found = find_double_triangles(g)
    if not found:
        raise ValueError("graph has no double triangle")
    a, b, c, d = which if which is not None else found[0]
    if which is not None and which not in found and (b, a, c, d) not in found:
        raise ValueError("not a double triangle of this graph")

    def ends(e):
        return {e[0], e[1]}

    ab = next(e for e in g.edges if ends(e) == {a, b})
    bc = next(e for e in g.edges if ends(e) == {b, c})
    bd = next(e for e in g.edges if ends(e) == {b, d})
    new_edges = []
    for e in g.edges:
        if e is ab or e is bd:
            continue
        if e is bc:
            new_edges.append((c, d, e[2]))
            continue
        t, h, l = e
        new_edges.append((a if t == b else t, a if h == b else h, l))
    out = Multigraph(g.vertex_count, tuple(new_edges))
    return out.delete_vertex(b)
