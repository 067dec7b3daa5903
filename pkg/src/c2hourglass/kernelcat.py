"""Kernel enumeration, triviality filters and the stored kernel catalog.

Kernels with n internal vertices are found by completing them to 4-regular
graphs: adding a square on the four externals gives a 4-regular graph on
n + 4 vertices.  So we generate all such graphs, keep the irreducible
primitive ones, open them along every 4-cycle and try all three ways to pair
the externals.  Survivors of the filters are deduplicated by a canonical
form of K' (the kernel with the two pairing edges, drawn as marked vertices).
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Sequence

from .graph_core import (Multigraph, find_double_triangles, has_3_vertex_split,
                         internally_6_edge_connected)
from .hourglass import KernelError, KernelSpec, build_chain, parse_kernel_text

MAX_INTERNAL = 5
STRETCH_INTERNAL = 6

DATA_DIR = Path(__file__).resolve().parent / "data" / "kernels"


# ---------------------------------------------------------------------------
# canonical form


def _refine(cells: list[list[int]], mult: list[dict[int, int]]) -> tuple[list[list[int]], tuple]:
    """Equitable refinement of an ordered partition.

    Cells are split by the multiset of (cell index, multiplicity) of each
    vertex's neighbours; subcells are ordered by that signature, so the result
    and the returned trace only depend on the graph up to isomorphism.
    """
    trace = []
    while True:
        where = {}
        for i, c in enumerate(cells):
            for v in c:
                where[v] = i
        new_cells = []
        changed = False
        for i, c in enumerate(cells):
            if len(c) == 1:
                new_cells.append(c)
                continue
            sigs = {}
            for v in c:
                s = tuple(sorted((where[w], m) for w, m in mult[v].items()))
                sigs.setdefault(s, []).append(v)
            if len(sigs) == 1:
                new_cells.append(c)
                continue
            changed = True
            for s in sorted(sigs):
                new_cells.append(sigs[s])
                trace.append((i, s, len(sigs[s])))
        cells = new_cells
        if not changed:
            return cells, tuple(trace)


def canonical_form(n: int, pairs: Sequence[tuple[int, int]], colors: Sequence | None = None):
    """Certificate of a vertex-colored multigraph, equal iff isomorphic.

    Individualization-refinement: at each level only the children with the
    smallest refinement trace are kept, and the certificate is the minimum
    over the leaves of (colors, multiplicity rows) in leaf order.
    """
    colors = list(colors) if colors is not None else [0] * n
    mult: list[dict[int, int]] = [dict() for _ in range(n)]
    for a, b in pairs:
        mult[a][b] = mult[a].get(b, 0) + 1
        if a != b:
            mult[b][a] = mult[b].get(a, 0) + 1
    by_color: dict = {}
    for v in range(n):
        by_color.setdefault(colors[v], []).append(v)
    start = [by_color[c] for c in sorted(by_color)]
    start, _ = _refine(start, mult)
    level = [start]
    while True:
        if all(len(c) == 1 for c in level[0]):
            break
        best, nxt = None, []
        for cells in level:
            k = min((i for i, c in enumerate(cells) if len(c) > 1), key=lambda i: (len(cells[i]), i))
            for v in cells[k]:
                rest = [w for w in cells[k] if w != v]
                child, tr = _refine(cells[:k] + [[v], rest] + cells[k + 1:], mult)
                if best is None or tr < best:
                    best, nxt = tr, [child]
                elif tr == best:
                    nxt.append(child)
        level = nxt
    cert = None
    for cells in level:
        order = [c[0] for c in cells]
        pos = {v: i for i, v in enumerate(order)}
        rows = tuple(tuple(sorted((pos[w], m) for w, m in mult[v].items())) for v in order)
        c = (tuple(colors[v] for v in order), rows)
        if cert is None or c < cert:
            cert = c
    return cert


def graph_certificate(g: Multigraph, colors=None):
    return canonical_form(g.vertex_count, [(t, h) for t, h, _ in g.edges], colors)


# ---------------------------------------------------------------------------
# 4-regular generation


def _regular_graphs_raw(N: int, r: int = 4):
    """Simple r-regular graphs on N vertices, up to a twin-class symmetry cut.

    Vertices are filled in order; among later vertices with identical current
    neighbourhoods only prefixes are chosen, so each isomorphism class still
    appears (usually several times).
    """
    adj = [set() for _ in range(N)]
    out = []

    def feasible(i):
        return all(r - len(adj[v]) <= N - 1 - (i + 1) for v in range(i + 1, N))

    def rec(i):
        if i == N:
            out.append([(a, b) for a in range(N) for b in adj[a] if a < b])
            return
        need = r - len(adj[i])
        classes: dict = {}
        for j in range(i + 1, N):
            if len(adj[j]) < r:
                classes.setdefault(frozenset(adj[j]), []).append(j)
        cl = list(classes.values())

        def choose(k, need, chosen):
            if need == 0:
                for j in chosen:
                    adj[i].add(j)
                    adj[j].add(i)
                if feasible(i):
                    rec(i + 1)
                for j in chosen:
                    adj[i].discard(j)
                    adj[j].discard(i)
                return
            if k == len(cl):
                return
            c = cl[k]
            for t in range(min(need, len(c)), -1, -1):
                choose(k + 1, need - t, chosen + c[:t])

        choose(0, need, [])

    rec(0)
    return out


def four_regular_graphs(N: int, connected_only: bool = True) -> list[Multigraph]:
    """All simple 4-regular graphs on N vertices up to isomorphism, in certificate order."""
    if N < 5:
        return []
    seen = {}
    for pairs in _regular_graphs_raw(N):
        g = Multigraph.from_pairs(N, pairs)
        if connected_only and not g.is_connected():
            continue
        cert = graph_certificate(g)
        seen.setdefault(cert, g)
    return [seen[c] for c in sorted(seen)]


def is_irreducible_primitive(g: Multigraph) -> bool:
    return g.is_connected() and internally_6_edge_connected(g) and not has_3_vertex_split(g)


def four_cycles(g: Multigraph) -> list[tuple[int, int, int, int]]:
    """Every 4-cycle (v0, v1, v2, v3) of a simple graph, once each."""
    adj = [set(g.neighbors(v)) for v in range(g.vertex_count)]
    out = set()
    for v0 in range(g.vertex_count):
        for v1, v3 in combinations(sorted(adj[v0]), 2):
            for v2 in adj[v1] & adj[v3]:
                if v2 == v0 or v2 in (v1, v3) or v2 < v0 or v1 < v0 or v3 < v0:
                    continue
                out.add((v0, v1, v2, v3))
    return sorted(out)


# ---------------------------------------------------------------------------
# filters


@dataclass(frozen=True)
class FilterVerdict:
    keep: bool
    reason: str = ""

    def __str__(self):
        return "keep" if self.keep else f"drop({self.reason})"


def hourglass_kernel() -> KernelSpec:
    """An hourglass with one external vertex of each triangle in each pair."""
    g = Multigraph.from_pairs(5, [(0, 1), (0, 4), (1, 4), (2, 3), (2, 4), (3, 4)], prefix="k")
    return KernelSpec(g, (0, 2, 1, 3), "1")


_HOURGLASS_CERT = None


def _is_hourglass(kernel: KernelSpec) -> bool:
    global _HOURGLASS_CERT
    if kernel.internal_count != 1:
        return False
    if _HOURGLASS_CERT is None:
        _HOURGLASS_CERT = kernel_certificate(hourglass_kernel())
    return kernel_certificate(kernel) == _HOURGLASS_CERT


def _external_hourglass(kernel: KernelSpec) -> bool:
    """An internal vertex m whose four neighbours are one external pair and
    two further vertices forming triangles with it, i.e. the kernel's end
    looks like one more hourglass of the chain."""
    g = kernel.graph
    ext = set(kernel.externals)
    adj = [set(g.neighbors(v)) for v in range(g.vertex_count)]
    for pair in kernel.bipartition:
        a, b = tuple(pair)
        for m in adj[a] & adj[b]:
            if m in ext:
                continue
            rest = adj[m] - {a, b}
            if len(rest) != 2 or len(set(g.neighbors(m))) != 4:
                continue
            c, d = tuple(rest)
            # triangles (a, m, x) and (b, m, y) with {x, y} = {c, d}
            if (c in adj[a] and d in adj[b]) or (d in adj[a] and c in adj[b]):
                return True
    return False


def _internal_four_edge_cut(kernel: KernelSpec) -> bool:
    """A set of 4 kernel edges whose removal splits off at least two internal
    vertices from all externals."""
    g = kernel.graph
    ext = set(kernel.externals)
    ends = [(t, h) for t, h, _ in g.edges]
    n = g.vertex_count
    for drop in combinations(range(len(ends)), 4):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        dropped = set(drop)
        for j, (t, h) in enumerate(ends):
            if j not in dropped:
                parent[find(t)] = find(h)
        sizes: dict[int, int] = {}
        touches: dict[int, bool] = {}
        for v in range(n):
            r = find(v)
            sizes[r] = sizes.get(r, 0) + 1
            touches[r] = touches.get(r, False) or v in ext
        if any(not touches[r] and sizes[r] >= 2 for r in sizes):
            return True
    return False


def triviality_filter(kernel: KernelSpec) -> FilterVerdict:
    """Decide whether a kernel (with its pairing) can give a new c2.

    Checks, in order: external-external edges, double triangles in the
    kernel, internal four-edge cuts, chain-extending external hourglasses,
    then the structure of the chain of length 3 glued to the kernel.
    """
    g = kernel.graph
    ext = set(kernel.externals)
    if _is_hourglass(kernel):
        return FilterVerdict(True)
    ee = [(t, h) for t, h, _ in g.edges if t in ext and h in ext]
    if len(ee) >= 2 and kernel.internal_count >= 2:
        return FilterVerdict(False, "subdivergence")
    if len(ee) == 1 and frozenset(ee[0]) in kernel.bipartition:
        return FilterVerdict(False, "double triangle")
    if find_double_triangles(g):
        return FilterVerdict(False, "double triangle")
    if _internal_four_edge_cut(kernel):
        return FilterVerdict(False, "subdivergence")
    if _external_hourglass(kernel):
        return FilterVerdict(False, "external hourglass")
    L = build_chain(kernel, 3).graph
    if find_double_triangles(L):
        return FilterVerdict(False, "double triangle")
    if has_3_vertex_split(L):
        return FilterVerdict(False, "3-vertex split")
    if not internally_6_edge_connected(L):
        return FilterVerdict(False, "subdivergence")
    return FilterVerdict(True)


def admissible_gluings(kernel: KernelSpec) -> list[tuple[int, int, int, int]]:
    """Pairings of the externals worth gluing, as (t1, t2, t3, t4) tuples.

    With exactly one external-external edge only the first pairing that does
    not put the edge inside a pair is kept; otherwise all three pairings that
    pass the filter are returned.
    """
    a, b, c, d = sorted(kernel.externals)
    out = []
    for p in ((a, b, c, d), (a, c, b, d), (a, d, b, c)):
        try:
            k = kernel.with_pairs(p)
        except KernelError:
            continue
        if triviality_filter(k).keep:
            out.append(p)
    ext = set(kernel.externals)
    ee = [(t, h) for t, h, _ in kernel.graph.edges if t in ext and h in ext]
    if len(ee) == 1 and out:
        out = out[:1]
    return out


# ---------------------------------------------------------------------------
# enumeration


def kernel_certificate(kernel: KernelSpec, ignore_pairing: bool = False):
    """Canonical form of K' with the two added edges drawn as marked vertices.

    The pairs may be swapped (the chain can be read from either end).  With
    ``ignore_pairing`` the externals are only colored, not joined.
    """
    g = kernel.graph
    n = g.vertex_count
    ext = set(kernel.externals)
    pairs = [(t, h) for t, h, _ in g.edges]
    colors = [1 if v in ext else 0 for v in range(n)]
    if not ignore_pairing:
        t1, t2, t3, t4 = kernel.externals
        pairs += [(t1, n), (t2, n), (t3, n + 1), (t4, n + 1)]
        colors += [2, 2]
        n += 2
    return canonical_form(n, pairs, colors)


def _square_openings(g: Multigraph):
    for cyc in four_cycles(g):
        ring = [frozenset((cyc[i], cyc[(i + 1) % 4])) for i in range(4)]
        keep = [(t, h) for t, h, _ in g.edges if frozenset((t, h)) not in ring]
        yield Multigraph.from_pairs(g.vertex_count, keep, prefix="k"), cyc


def _relabel_kernel(g: Multigraph, externals) -> KernelSpec:
    """Move the externals to vertices 0..3 (in the given order) and number edges k1, k2, ..."""
    order = list(externals) + [v for v in range(g.vertex_count) if v not in externals]
    pos = {v: i for i, v in enumerate(order)}
    pairs = sorted(tuple(sorted((pos[t], pos[h]))) for t, h, _ in g.edges)
    return KernelSpec(Multigraph.from_pairs(g.vertex_count, pairs, prefix="k"), (0, 1, 2, 3))


def _small_kernels() -> list[KernelSpec]:
    """Kernels without internal vertices: 2-regular loopless multigraphs on 4 vertices."""
    shapes = [[(0, 1), (1, 2), (2, 3), (3, 0)], [(0, 1), (0, 1), (2, 3), (2, 3)]]
    out = []
    for pairs in shapes:
        g = Multigraph.from_pairs(4, pairs, prefix="k")
        for p in ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)):
            try:
                out.append(KernelSpec(g, p))
            except KernelError:
                pass
    return out


@dataclass
class EnumerationReport:
    n_internal: int
    completions: int = 0  # 4-regular graphs on n+4 vertices up to isomorphism
    primitive: int = 0
    raw_kernels: int = 0  # distinct (kernel, pairing) before filtering
    dropped: dict = field(default_factory=dict)
    kernels: list = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"internal vertices {self.n_internal}",
                 f"4-regular completions {self.completions}",
                 f"irreducible primitive {self.primitive}",
                 f"kernels before filters {self.raw_kernels}"]
        for r in sorted(self.dropped):
            lines.append(f"dropped ({r}) {self.dropped[r]}")
        lines.append(f"kernels kept {len(self.kernels)}")
        return "\n".join(lines) + "\n"


def _candidates_from(g: Multigraph):
    out = []
    for k, cyc in _square_openings(g):
        base = _relabel_kernel(k, cyc)
        for p in ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)):
            try:
                out.append(base.with_pairs(p))
            except KernelError:
                continue
    return out


def _judge(kernel: KernelSpec):
    ext = set(kernel.externals)
    ee = sum(1 for t, h, _ in kernel.graph.edges if t in ext and h in ext)
    raw = kernel_certificate(kernel)
    key = kernel_certificate(kernel, ignore_pairing=True) if ee == 1 else raw
    return raw, key, triviality_filter(kernel)


def enumerate_kernels_report(n_internal: int, *, allow_stretch: bool = False, workers: int = 1) -> EnumerationReport:
    limit = STRETCH_INTERNAL if allow_stretch else MAX_INTERNAL
    if not 0 <= n_internal <= limit:
        raise ValueError(f"n_internal must be between 0 and {limit}")
    rep = EnumerationReport(n_internal)
    if n_internal == 0:
        cands = _small_kernels()
    else:
        graphs = four_regular_graphs(n_internal + 4)
        rep.completions = len(graphs)
        prim = [g for g in graphs if is_irreducible_primitive(g)]
        rep.primitive = len(prim)
        cands = [k for g in prim for k in _candidates_from(g)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            judged = list(ex.map(_judge, cands, chunksize=16))
    else:
        judged = [_judge(k) for k in cands]
    raw_seen, kept = set(), {}
    for k, (raw, key, verdict) in zip(cands, judged):
        if raw in raw_seen:
            continue
        raw_seen.add(raw)
        if not verdict.keep:
            rep.dropped[verdict.reason] = rep.dropped.get(verdict.reason, 0) + 1
            continue
        kept.setdefault(key, k)
    rep.raw_kernels = len(raw_seen)
    rep.kernels = [kept[c] for c in sorted(kept)]
    return rep


def enumerate_kernels(n_internal: int, *, allow_stretch: bool = False, workers: int = 1) -> list[KernelSpec]:
    """Effectively different kernels with ``n_internal`` internal vertices."""
    return enumerate_kernels_report(n_internal, allow_stretch=allow_stretch, workers=workers).kernels


# ---------------------------------------------------------------------------
# published values


PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# kernel counts by number of internal vertices (published table of counts)
TABLE1_COUNTS = {0: 1, 1: 1, 2: 1, 3: 1, 4: 5, 5: 17, 6: 78}

# c2 rows as published; sequences are -c2 mod p for p = 2, 3, 5, ...
TABLE2_ROWS = {
    "0": "legendre(-4)",
    "1": "legendre(4)",
    "2": "legendre(4)",
    "3": "modular weight 4 level 8",
    "4,1": "legendre(-4)",
    "4,2": "0,2,3,2,3,8,15,9,6,27,11,32",
    "4,3": "legendre(4)",
    "4,4": "0,0,0,0,0,7,16,0,0,22,0,19",
    "4,5": "0,1,3,5,8,8,15,10,17,27,20,32",
    "5,1": "modular weight 4 level 16",
    "5,2": "legendre(4)",
    "5,3": "modular weight 9 level 4",
    "5,4": "0,1,1,1,2,4",
    "5,5": "0,1,1,0,2,0,3",
    "5,6": "0,1,4,2,0,3,1",
    "5,7": "0,2,4,2,8,4",
    "5,8": "0,2,0,6,10,9,10",
    "5,9": "0,2,4,5,0,3,1,2",
    "5,10": "0,1,1,1,1,7,6,17,2",
    "5,11": "0,1,1,6,1,11,2",
    "5,12": "0,1,4,5,4,4,11",
    "5,13": "0,0,1,5,1,3,16",
    "5,14": "modular weight 6 level 4",
    "5,15": "0,0,0,4,5,10,3",
    "5,16": "0,0,3,0,0,3,1,0,0,25",
    "5,17": "modular weight 6 level 4",
}


def _eta_product(factors: Sequence[tuple[int, int]], shift: int, terms: int) -> list[int]:
    """Coefficients of q^shift * prod_m prod_n (1 - q^{m n})^e for (m, e) in factors."""
    ser = [0] * terms
    ser[0] = 1
    for m, e in factors:
        for n in range(1, terms):
            step = m * n
            if step >= terms:
                break
            for _ in range(abs(e)):
                if e > 0:
                    for i in range(terms - 1, step - 1, -1):
                        ser[i] -= ser[i - step]
                else:
                    # divide by (1 - q^step)
                    for i in range(step, terms):
                        ser[i] += ser[i - step]
    out = [0] * terms
    for i in range(terms - shift):
        out[i + shift] = ser[i]
    return out


# unique normalized newforms with these weight and level, as eta quotients
ETA_FORMS = {
    "modular weight 4 level 8": ((2, 4), (4, 4)),
    # the twist of the level 8 form by (-4/p)
    "modular weight 4 level 16": ((2, -4), (4, 16), (8, -4)),
    "modular weight 6 level 4": ((2, 12),),
}


def expected_prefix(label: str, qs: Sequence[int]) -> list[int | None] | None:
    """Published -c2 mod p values for a catalog label, None where not determined.

    Returns None altogether when the row is a form we have no coefficients for.
    """
    from .c2engine import kronecker

    row = TABLE2_ROWS[label]
    if row.startswith("legendre("):
        d = int(row[len("legendre("):-1])
        return [kronecker(d, q) % q for q in qs]
    if row in ETA_FORMS:
        coeffs = _eta_product(ETA_FORMS[row], 1, max(qs) + 1)
        return [coeffs[q] % q for q in qs]
    if row.startswith("modular"):
        return None
    seq = dict(zip(PRIMES, (int(x) for x in row.split(","))))
    return [seq.get(q) for q in qs]


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class KernelCatalogEntry:
    label: str
    kernel: KernelSpec
    gluing_variants: tuple  # admissible bipartitions of the same kernel graph


class CatalogChecksumError(ValueError):
    pass


def _label_key(label: str):
    return tuple(int(x) for x in label.split(","))


def _checksums() -> dict[str, str]:
    out = {}
    for line in (DATA_DIR / "CHECKSUMS").read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            digest, name = line.split()
            out[name] = digest
    return out


def load_kernel(path) -> KernelSpec:
    """Read a kernel file.

    Paths like ``data/kernels/4_2`` and bare labels like ``4,2`` fall back to the
    bundled catalog.
    """
    p = Path(path)
    if not p.exists():
        alt = DATA_DIR / p.name.replace(",", "_")
        if not alt.exists():
            raise FileNotFoundError(str(path))
        p = alt
    return parse_kernel_text(p.read_text(), p.name.replace("_", ","))


def catalog() -> list[KernelCatalogEntry]:
    """The stored kernels, checked against their checksums, in label order."""
    sums = _checksums()
    out = []
    for name in sorted(sums, key=lambda n: _label_key(n.replace("_", ","))):
        data = (DATA_DIR / name).read_bytes()
        if hashlib.sha256(data).hexdigest() != sums[name]:
            raise CatalogChecksumError(f"catalog file {name} does not match its checksum")
        label = name.replace("_", ",")
        k = parse_kernel_text(data.decode(), label)
        variants = tuple(tuple(sorted(k.with_pairs(p).bipartition, key=sorted))
                         for p in admissible_gluings(k))
        out.append(KernelCatalogEntry(label, k, variants))
    return out
