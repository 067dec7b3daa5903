"""Classical and quadratic denominator reduction on factored invariants.

An invariant is kept as sign * prod f_i^{m_i}.  Steps never factor
polynomials in general; they only keep whatever product structure the step
formula itself produces, plus cheap normalizations (content, monomial
content, perfect squares).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import gcd
from typing import Iterable, Sequence

from .graph_core import Multigraph
from .graphpoly import dodgson
from .polyring import IntPoly, factor_poly, pack, poly_sqrt, to_text, unpack

CLASSICAL = "classical"
QUADRATIC = "quadratic"


@dataclass(frozen=True)
class WeightDrop:
    """The invariant vanished."""

    reduced_edges: tuple[str, ...] = ()
    kind: str = CLASSICAL

    def to_text(self) -> str:
        return "0"


@dataclass(frozen=True)
class Stuck:
    reason: str


@dataclass(frozen=True)
class FactoredInvariant:
    sign: int
    factors: tuple[tuple[IntPoly, int], ...]
    reduced_edges: tuple[str, ...]
    kind: str
    remaining: tuple[str, ...]  # variables the invariant is summed over
    sign_ambiguous: bool = False

    def expand(self) -> IntPoly:
        out = IntPoly.const(self.sign)
        for f, m in self.factors:
            out = out * f**m
        return out

    def variables(self) -> set[str]:
        vs: set[str] = set()
        for f, _ in self.factors:
            vs |= set(f.vars)
        return vs

    def total_degree(self) -> int:
        return sum(m * f.total_degree() for f, m in self.factors)

    def factor_list(self) -> list[tuple[IntPoly, int]]:
        """Factors including the sign as a constant factor."""
        out = list(self.factors)
        if self.sign == -1:
            out.append((IntPoly.const(-1), 1))
        return out

    def squared(self) -> FactoredInvariant:
        return FactoredInvariant(1, tuple((f, 2 * m) for f, m in self.factors), self.reduced_edges,
                                 QUADRATIC, self.remaining, False)

    def key(self):
        return (self.kind, self.sign, self.factors)

    def to_text(self) -> str:
        parts = []
        for f, m in self.factors:
            s = f"({to_text(f)})"
            parts.append(s if m == 1 else f"{s}^{m}")
        body = "*".join(parts) if parts else "1"
        prefix = "+-" if self.sign_ambiguous else ("-" if self.sign < 0 else "")
        return prefix + body


Invariant = FactoredInvariant | WeightDrop


@dataclass
class ReductionOutcome:
    final: Invariant
    steps: list[tuple[str, str]] = field(default_factory=list)
    stuck_reason: str | None = None
    history: list[Invariant] = field(default_factory=list)


# ---------------------------------------------------------------------------
# normalization


def _monomial_content(f: IntPoly) -> dict[str, int]:
    n = len(f.vars)
    mins = None
    for k in f.terms:
        e = unpack(k, n)
        mins = list(e) if mins is None else [min(a, b) for a, b in zip(mins, e)]
    return {v: e for v, e in zip(f.vars, mins or []) if e}


def _divide_monomial(f: IntPoly, mono: dict[str, int]) -> IntPoly:
    n = len(f.vars)
    sub = [mono.get(v, 0) for v in f.vars]
    terms = {}
    for k, c in f.terms.items():
        e = unpack(k, n)
        terms[pack([a - b for a, b in zip(e, sub)])] = c
    return IntPoly(f.vars, terms)


def normalize(sign: int, factors: Iterable[tuple[IntPoly, int]]):
    """Return (sign, factors) or None for a zero product.

    Factors become primitive with positive leading coefficient; integer
    content is collected into one constant factor; monomial content is split
    off into single-variable factors; perfect squares are detected; equal
    factors are merged.
    """
    const = 1
    merged: dict[IntPoly, int] = {}
    stack = [(f, m) for f, m in factors if m]
    while stack:
        f, m = stack.pop()
        if f.is_zero():
            return None
        if f.is_constant():
            const *= f.constant_value() ** m
            continue
        c = f.content()
        _, lc = f.leading_term()
        if lc < 0:
            c = -c
        if c != 1:
            const *= c**m
            f = f.exact_div_int(c)
        mono = _monomial_content(f)
        if len(f) == 1:
            for v, e in mono.items():
                x = IntPoly.var(v)
                merged[x] = merged.get(x, 0) + e * m
            continue
        if mono:
            for v, e in mono.items():
                stack.append((IntPoly.var(v), e * m))
            f = _divide_monomial(f, mono)
            stack.append((f, m))
            continue
        if len(f) > 1:
            r = poly_sqrt(f)
            if r is not None:
                stack.append((r, 2 * m))
                continue
        merged[f] = merged.get(f, 0) + m
    if const < 0:
        sign, const = -sign, -const
    out = sorted(merged.items(), key=lambda fm: (len(fm[0]), to_text(fm[0]), fm[1]))
    if const != 1:
        out.insert(0, (IntPoly.const(const), 1))
    return sign, tuple(out)


def make_invariant(sign, factors, reduced, kind, remaining, ambiguous=False) -> Invariant:
    res = normalize(sign, factors)
    if res is None:
        return WeightDrop(tuple(reduced), kind)
    s, fs = res
    return FactoredInvariant(s, fs, tuple(reduced), kind, tuple(remaining), ambiguous)


def factor_invariant(inv: Invariant) -> Invariant:
    """Split every factor into irreducibles; the product is unchanged."""
    if isinstance(inv, WeightDrop):
        return inv
    fs = []
    for f, m in inv.factors:
        for g, k in factor_poly(f):
            fs.append((g, k * m))
    return make_invariant(inv.sign, fs, inv.reduced_edges, inv.kind, inv.remaining, inv.sign_ambiguous)


# ---------------------------------------------------------------------------
# initial invariants


def _check_edges(G: Multigraph, edges):
    if len(set(edges)) != len(edges):
        raise ValueError("edges must be distinct")
    if len(G.edges) < 3:
        raise ValueError("need at least 3 edges")
    for e in edges:
        G.edge(e)


def three_invariant(G: Multigraph, e1: str, e2: str, e3: str) -> Invariant:
    """+-Psi^{13,23} Psi^{1,2}_{G,3} as a two-factor invariant."""
    _check_edges(G, [e1, e2, e3])
    a = dodgson(G, I=(e1, e3), J=(e2, e3))
    b = dodgson(G, I=(e1,), J=(e2,), K=(e3,))
    rem = tuple(l for l in G.labels if l not in (e1, e2, e3))
    return make_invariant(1, [(a, 1), (b, 1)], (e1, e2, e3), CLASSICAL, rem, True)


def four_invariant(G: Multigraph, e1: str, e2: str, e3: str, e4: str) -> Invariant:
    """+-Psi^{14,23} Psi^{13,24}, the factorized 4-invariant."""
    _check_edges(G, [e1, e2, e3, e4])
    a = dodgson(G, I=(e1, e4), J=(e2, e3))
    b = dodgson(G, I=(e1, e3), J=(e2, e4))
    rem = tuple(l for l in G.labels if l not in (e1, e2, e3, e4))
    return make_invariant(1, [(a, 1), (b, 1)], (e1, e2, e3, e4), CLASSICAL, rem, True)


def five_invariant(G: Multigraph, e1: str, e2: str, e3: str, e4: str, e5: str) -> Invariant:
    _check_edges(G, [e1, e2, e3, e4, e5])
    inv = four_invariant(G, e1, e2, e3, e4)
    res = classical_step(inv, e5)
    if isinstance(res, Stuck):
        raise AssertionError(f"5-invariant failed to exist: {res.reason}")
    return res


# ---------------------------------------------------------------------------
# steps


def _split(inv: FactoredInvariant, x: str):
    free, dep = [], []
    for f, m in inv.factors:
        (dep if x in f.vars else free).append((f, m))
    return free, dep


def _lin(f: IntPoly, x: str):
    parts = f.coefficients_in(x)
    zero = IntPoly.const(0)
    return parts.get(1, zero), parts.get(0, zero)


def _quad(f: IntPoly, x: str):
    parts = f.coefficients_in(x)
    zero = IntPoly.const(0)
    return parts.get(2, zero), parts.get(1, zero), parts.get(0, zero)


def classical_step(inv: Invariant, x: str) -> Invariant | Stuck:
    """(Ax+B)(Cx+D) -> +-(AD-BC)."""
    if isinstance(inv, WeightDrop):
        return inv
    if inv.kind != CLASSICAL:
        raise ValueError("classical step on a quadratic invariant")
    reduced = inv.reduced_edges + (x,)
    remaining = tuple(v for v in inv.remaining if v != x)
    free, dep = _split(inv, x)
    degs = []
    for f, m in dep:
        degs += [f.degree(x)] * m
    total = sum(degs)
    if total == 0:
        return WeightDrop(reduced, CLASSICAL)
    if total > 2:
        return Stuck(f"degree {total} in {x}")
    if degs == [1]:
        (f, _), = dep
        A, _ = _lin(f, x)
        new = [(A, 1)]
    elif degs == [1, 1]:
        if len(dep) == 1:
            return WeightDrop(reduced, CLASSICAL)  # (Ax+B)^2 gives AB-BA
        (f, _), (g, _) = dep
        A, B = _lin(f, x)
        C, D = _lin(g, x)
        new = [(A * D - B * C, 1)]
    else:
        (f, m), = dep
        a, b, c = _quad(f, x)
        r = poly_sqrt(b * b - (a * c).scale(4))
        if r is None:
            return Stuck(f"quadratic factor in {x} does not split")
        new = [(r, 1)]
    return make_invariant(1, free + new, reduced, CLASSICAL, remaining, True)


def _expand(factors) -> IntPoly:
    out = IntPoly.const(1)
    for f, m in factors:
        out = out * f**m
    return out


def quadratic_step(inv: Invariant, x: str) -> Invariant | Stuck:
    """Quadratic reduction: (Ax^2+Bx+C)^2 -> B^2-4AC, (Dx^2+Ex+F)(Hx+J)^2 -> DJ^2-EHJ+FH^2."""
    if isinstance(inv, WeightDrop):
        return WeightDrop(inv.reduced_edges + (x,), QUADRATIC)
    if inv.kind != QUADRATIC:
        raise ValueError("quadratic step on a classical invariant")
    nvars = len(inv.remaining)
    if inv.total_degree() > 2 * nvars:
        return Stuck(f"degree guard: total degree {inv.total_degree()} exceeds twice {nvars} variables")
    reduced = inv.reduced_edges + (x,)
    remaining = tuple(v for v in inv.remaining if v != x)
    factors = inv.factor_list()
    free = [(f, m) for f, m in factors if x not in f.vars]
    dep = [(f, m) for f, m in factors if x in f.vars]
    sq = [(f, m // 2) for f, m in dep if m // 2]
    odd = [(f, 1) for f, m in dep if m % 2]
    sq_deg = sum(f.degree(x) * k for f, k in sq)
    odd_deg = sum(f.degree(x) for f, _ in odd)
    free_odd = any(m % 2 for _, m in free)

    case1 = None
    if not odd and not free_odd and sq_deg <= 2:
        if sq_deg == 0:
            return WeightDrop(reduced, QUADRATIC)
        carry = list(free)
        if sq_deg == 1 or len(sq) == 1 and sq[0][1] == 1:
            (f, k), = sq
            if f.degree(x) == 1:
                A, _ = _lin(f, x)
                new = [(A, 2)]
            else:
                a, b, c = _quad(f, x)
                new = [(b * b - (a * c).scale(4), 1)]
        else:
            # two linear square roots: S = (ax+b)(cx+d), B^2-4AC = (ad-bc)^2
            lins = []
            for f, k in sq:
                lins += [f] * k
            (a, b), (c, d) = _lin(lins[0], x), _lin(lins[1], x)
            new = [(a * d - b * c, 2)]
        case1 = make_invariant(1, carry + new, reduced, QUADRATIC, remaining)

    case2 = None
    if sq_deg <= 1 and odd_deg <= 2:
        carry = list(free)
        if sq_deg == 1:
            (h, k), = [(f, k) for f, k in sq]
            H, J = _lin(h, x)
        else:
            H, J = IntPoly.const(0), IntPoly.const(1)
        new = []
        for f, _ in odd:
            d = f.degree(x)
            if d == 1:
                a, b = _lin(f, x)
                new.append((b * H - a * J, 1))
            else:
                D, E, F = _quad(f, x)
                new.append((D * J * J - E * H * J + F * H * H, 1))
        pad = 2 - odd_deg
        if pad:
            new.append((H, pad))
        case2 = make_invariant(1, carry + new, reduced, QUADRATIC, remaining)

    if case1 is not None and case2 is not None:
        v1 = 0 if isinstance(case1, WeightDrop) else case1.expand()
        v2 = 0 if isinstance(case2, WeightDrop) else case2.expand()
        if v1 != v2:
            raise AssertionError(f"quadratic reduction cases disagree on {x}")
    res = case1 if case1 is not None else case2
    if res is None:
        return Stuck(f"no quadratic reduction case applies to {x}")
    return res


def step_case(inv: Invariant, x: str) -> str:
    """Which case a successful step on ``x`` used (for traces)."""
    if isinstance(inv, FactoredInvariant) and inv.kind == CLASSICAL:
        return "classical"
    if isinstance(inv, WeightDrop):
        return "quad-case1"
    factors = inv.factor_list()
    dep = [(f, m) for f, m in factors if x in f.vars]
    free_odd = any(m % 2 for f, m in factors if x not in f.vars)
    if not free_odd and all(m % 2 == 0 for _, m in dep):
        return "quad-case1"
    return "quad-case2"


# ---------------------------------------------------------------------------
# driver


def _advance(inv: Invariant, x: str):
    """One step on x in the invariant's current mode; classical failures retry quadratically."""
    if isinstance(inv, WeightDrop):
        return inv, ("quad-case1" if inv.kind == QUADRATIC else "classical")
    if inv.kind == CLASSICAL:
        res = classical_step(inv, x)
        if not isinstance(res, Stuck):
            return res, "classical"
        sq = inv.squared()
        res = quadratic_step(sq, x)
        return res, (step_case(sq, x) if not isinstance(res, Stuck) else None)
    res = quadratic_step(inv, x)
    return res, (step_case(inv, x) if not isinstance(res, Stuck) else None)


def reduce_invariant(inv: Invariant, order: Sequence[str] | None = None,
                     strategy: str = "given-order") -> ReductionOutcome:
    """Reduce as far as possible, classically while the steps succeed, then quadratically."""
    if strategy == "given-order":
        seq = list(order) if order is not None else list(inv.remaining)
        out = ReductionOutcome(inv, history=[inv])
        cur = inv
        for x in seq:
            if isinstance(cur, WeightDrop):
                break
            res, case = _advance(cur, x)
            if isinstance(res, Stuck):
                out.stuck_reason = f"{x}: {res.reason}"
                break
            cur = res
            out.steps.append((x, case))
            out.history.append(cur)
        out.final = cur
        return out
    if strategy == "greedy-search":
        return _search(inv)
    raise ValueError(f"unknown strategy {strategy!r}")


def _score(outcome: ReductionOutcome):
    wd = isinstance(outcome.final, WeightDrop)
    return (wd, len(outcome.steps))


def _search(inv: Invariant) -> ReductionOutcome:
    memo: dict = {}

    def rec(cur: Invariant) -> ReductionOutcome:
        if isinstance(cur, WeightDrop):
            return ReductionOutcome(cur, history=[cur])
        key = (cur.key(), cur.remaining)
        if key in memo:
            return memo[key]
        best = ReductionOutcome(cur, history=[cur], stuck_reason="no variable reduces")
        for x in sorted(cur.remaining):
            res, case = _advance(cur, x)
            if isinstance(res, Stuck):
                continue
            sub = rec(res)
            cand = ReductionOutcome(sub.final, [(x, case)] + sub.steps, sub.stuck_reason,
                                    [cur] + sub.history)
            if _score(cand) > _score(best):
                best = cand
        if not cur.remaining:
            best.stuck_reason = None
        memo[key] = best
        return best

    return rec(inv)


def reduce(G: Multigraph, start_edges: Sequence[str], strategy: str = "given-order",
           order: Sequence[str] | None = None) -> ReductionOutcome:
    """Start from the 3-invariant of ``start_edges`` and reduce the remaining edges."""
    if len(start_edges) != 3:
        raise ValueError("need exactly three start edges")
    inv = three_invariant(G, *start_edges)
    if order is None:
        order = [l for l in G.labels if l not in start_edges]
    return reduce_invariant(inv, order, strategy)


def trace_text(outcome: ReductionOutcome) -> str:
    lines = []
    inv0 = outcome.history[0]
    lines.append(f"start {','.join(inv0.reduced_edges)} : {inv0.to_text()}")
    for (x, case), inv in zip(outcome.steps, outcome.history[1:]):
        lines.append(f"{x} {case} : {inv.to_text()}")
    if isinstance(outcome.final, WeightDrop):
        lines.append("result weight-drop")
    elif outcome.stuck_reason:
        lines.append(f"stuck {outcome.stuck_reason}")
    else:
        lines.append("result complete")
    return "\n".join(lines) + "\n"
