"""Routes to c2^{(q)}, cross-validation, prefixes and sequence matching."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .finitefield import (DEFAULT_BUDGET, C2Prefix, FieldSpec, field_for_q, legendre_sum,
                          point_count)
from .graph_core import Multigraph
from .graphpoly import InternalCheckError, dodgson, kirchhoff
from .reduction import (CLASSICAL, FactoredInvariant, ReductionOutcome, WeightDrop, reduce)

ROUTES = ("psi-count", "three-inv", "classical-reduction", "quadratic-reduction", "hourglass-theorem")


class RouteInapplicable(ValueError):
    """A route's preconditions do not hold for this graph or field."""


def _check_graph(G: Multigraph):
    if not G.is_connected():
        raise RouteInapplicable("graph is not connected")
    if len(G.edges) < 3:
        raise RouteInapplicable("graph has fewer than 3 edges")


def c2_via_psi(G: Multigraph, field: FieldSpec, *, budget=DEFAULT_BUDGET, workers=1) -> int:
    _check_graph(G)
    q = field.q
    n = point_count(kirchhoff(G), field, list(G.labels), budget=budget, workers=workers)
    if n % (q * q):
        raise InternalCheckError(f"[Psi]_{q} = {n} is not divisible by {q}^2")
    return (n // (q * q)) % q


def degree3_edges(G: Multigraph, v: int) -> tuple[str, str, str]:
    inc = [l for t, h, l in G.edges if t == v or h == v]
    if G.degree(v) != 3 or len(inc) != 3:
        raise RouteInapplicable(f"vertex {v} does not have degree 3")
    return tuple(inc)


def c2_via_3inv(G: Multigraph, v: int, field: FieldSpec, *, budget=DEFAULT_BUDGET, workers=1) -> int:
    _check_graph(G)
    e1, e2, e3 = degree3_edges(G, v)
    a = dodgson(G, I=(e1, e3), J=(e2, e3))
    b = dodgson(G, I=(e1,), J=(e2,), K=(e3,))
    if a.is_zero() or b.is_zero():
        return 0
    rest = [l for l in G.labels if l not in (e1, e2, e3)]
    n = point_count([(a, 1), (b, 1)], field, rest, budget=budget, workers=workers)
    return (-n) % field.q


def _h1_ok(G: Multigraph) -> bool:
    return 2 * G.h1() <= len(G.edges)


def c2_via_reduction(G: Multigraph, outcome: ReductionOutcome, field: FieldSpec,
                     route: str = "quadratic", *, budget=DEFAULT_BUDGET, workers=1) -> int:
    """Residue from a reduction outcome.

    ``route="classical"`` point-counts the last classical invariant with
    n < |E|; ``route="quadratic"`` takes the signed Legendre sum of the final
    (squared if needed) invariant with n < |E|.
    """
    _check_graph(G)
    if not _h1_ok(G):
        raise RouteInapplicable("h1 exceeds half the number of edges")
    q = field.q
    nedges = len(G.edges)
    if route == "classical":
        cands = [inv for inv in outcome.history
                 if isinstance(inv, WeightDrop) or inv.kind == CLASSICAL]
        cands = [inv for inv in cands if len(inv.reduced_edges) < nedges]
        if not cands:
            raise RouteInapplicable("no classical invariant with n < |E|")
        inv = cands[-1]
        if isinstance(inv, WeightDrop):
            return 0
        n = len(inv.reduced_edges)
        cnt = point_count(inv.factor_list(), field, list(inv.remaining),
                          budget=budget, workers=workers)
        return ((-1) ** n * cnt) % q
    if route != "quadratic":
        raise ValueError(f"unknown reduction route {route!r}")
    cands = [inv for inv in outcome.history if len(inv.reduced_edges) < nedges]
    if not cands:
        raise RouteInapplicable("no invariant with n < |E|")
    inv = cands[-1]
    if isinstance(inv, WeightDrop):
        return 0
    if inv.kind == CLASSICAL:
        inv = inv.squared()
    n = len(inv.reduced_edges)
    if q % 2 == 0:
        if all(c % 2 == 0 for _, c in inv.expand().terms.items()):
            return 0
        raise RouteInapplicable("quadratic route needs odd q unless the invariant vanishes mod 2")
    s = legendre_sum(inv.factor_list(), field, list(inv.remaining), budget=budget, workers=workers)
    return ((-1) ** (n - 1) * s) % q


def default_start(G: Multigraph) -> tuple[str, str, str]:
    for v in range(G.vertex_count):
        if G.degree(v) == 3:
            try:
                return degree3_edges(G, v)
            except RouteInapplicable:
                continue
    return tuple(G.labels[:3])


def first_degree3_vertex(G: Multigraph) -> int:
    for v in range(G.vertex_count):
        if G.degree(v) == 3 and len([1 for t, h, _ in G.edges if v in (t, h)]) == 3:
            return v
    raise RouteInapplicable("graph has no degree 3 vertex")


def c2_graph(G: Multigraph, field: FieldSpec, route: str, *, outcome: ReductionOutcome | None = None,
             budget=DEFAULT_BUDGET, workers=1) -> int:
    if route == "psi-count":
        return c2_via_psi(G, field, budget=budget, workers=workers)
    if route == "three-inv":
        return c2_via_3inv(G, first_degree3_vertex(G), field, budget=budget, workers=workers)
    if route in ("classical-reduction", "quadratic-reduction"):
        if outcome is None:
            outcome = reduce(G, default_start(G), strategy="greedy-search")
        return c2_via_reduction(G, outcome, field, route.split("-")[0], budget=budget, workers=workers)
    raise ValueError(f"route {route!r} does not apply to plain graphs")


def prefix(target, qs: Sequence[int], route: str, *, budget=DEFAULT_BUDGET, workers=1) -> C2Prefix:
    """c2 residues of a graph or kernel at each q in ``qs``, in order."""
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}")
    entries = []
    if route == "hourglass-theorem":
        from .hourglass import c2_hourglass
        for q in qs:
            entries.append((q, c2_hourglass(target, field_for_q(q), budget=budget, workers=workers)))
        return C2Prefix(tuple(entries))
    if not isinstance(target, Multigraph):
        raise TypeError("graph routes need a Multigraph target")
    outcome = None
    if route in ("classical-reduction", "quadratic-reduction"):
        outcome = reduce(target, default_start(target), strategy="greedy-search")
    for q in qs:
        r = c2_graph(target, field_for_q(q), route, outcome=outcome, budget=budget, workers=workers)
        entries.append((q, r))
    return C2Prefix(tuple(entries))


# ---------------------------------------------------------------------------
# sequence matching


def kronecker(d: int, p: int) -> int:
    """Kronecker symbol (d/p) for a prime p."""
    if p == 2:
        if d % 2 == 0:
            return 0
        return 1 if d % 8 in (1, 7) else -1
    r = pow(d % p, (p - 1) // 2, p)
    return 0 if r == 0 else (1 if r == 1 else -1)


@dataclass(frozen=True)
class Candidate:
    name: str
    coefficients: Mapping[int, int] | None = None  # p -> a_p
    legendre: int | None = None

    def value(self, p: int) -> int | None:
        if self.legendre is not None:
            return kronecker(self.legendre, p)
        return self.coefficients.get(p) if self.coefficients else None


def legendre_candidate(d: int) -> Candidate:
    return Candidate(f"legendre({d})", legendre=d)


def read_coefficient_file(text: str, name: str = "file") -> Candidate:
    coeffs = {}
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    for row in csv.reader(io.StringIO("\n".join(rows))):
        if len(row) != 2:
            raise ValueError(f"malformed coefficient row: {row!r}")
        try:
            p, a = int(row[0]), int(row[1])
        except ValueError:
            if row[0].strip() == "p":
                continue
            raise ValueError(f"malformed coefficient row: {row!r}") from None
        coeffs[p] = a
    return Candidate(name, coefficients=coeffs)


@dataclass
class MatchLine:
    name: str
    consistent: bool
    primes_checked: int
    first_mismatch: int | None = None


@dataclass
class MatchReport:
    transform: str
    lines: list[MatchLine] = field(default_factory=list)

    def to_text(self) -> str:
        out = [f"transform {self.transform}"]
        for ln in self.lines:
            verdict = "consistent" if ln.consistent else f"inconsistent at q={ln.first_mismatch}"
            out.append(f"{ln.name}: {verdict} ({ln.primes_checked} values compared)")
        return "\n".join(out) + "\n"


TRANSFORMS = ("negation", "identity")


def match_sequence(pre: C2Prefix, candidates: Sequence[Candidate], transform: str = "negation") -> MatchReport:
    """Compare each candidate's a_p mod q with the prefix (negated c2 by default)."""
    if transform not in TRANSFORMS:
        raise ValueError(f"unknown transform {transform!r}")
    report = MatchReport(transform)
    for cand in candidates:
        checked, bad = 0, None
        for q, r in pre.entries:
            a = cand.value(q)
            if a is None:
                continue
            mine = (-r) % q if transform == "negation" else r
            checked += 1
            if a % q != mine:
                bad = q
                break
        report.lines.append(MatchLine(cand.name, bad is None, checked, bad))
    return report
