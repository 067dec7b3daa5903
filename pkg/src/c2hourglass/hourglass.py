"""Hourglass chains, the K' builder, the kernel formula for c2 and the endgame check.

A kernel is a graph whose vertices have degree 4 except four external
vertices of degree 2, split into pairs {t1,t2} and {t3,t4}.  An hourglass
chain is glued to the kernel by identifying its end vertices with the
externals, so every vertex of the result has degree 4.

Hourglass i has center m_i, outer vertices w_i, x_i (first triangle) and
y_i, z_i (second triangle), and edges

    a_i = w_i x_i    b_i = m_i x_i    c_i = m_i w_i
    d_i = m_i z_i    e_i = m_i y_i    f_i = y_i z_i

The pair (w_i, y_i) is identified with the top pair (x_{i-1}, z_{i-1}) of
the previous hourglass, or with (t1, t2) for i = 1; the top pair of the last
hourglass is identified with (t3, t4), or (t4, t3) with the twist.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .finitefield import DEFAULT_BUDGET, FieldSpec, SumStats, legendre_sum
from .graph_core import GraphFormatError, Multigraph, parse_graph_text, to_edge_list
from .graphpoly import InternalCheckError, dodgson
from .polyring import IntPoly
from .reduction import (QUADRATIC, FactoredInvariant, Stuck, WeightDrop, factor_invariant,
                        make_invariant, quadratic_step)

EDGE1 = "1"
EDGE2 = "2"
HOURGLASS_LETTERS = "abcdef"


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class KernelSpec:
    graph: Multigraph
    externals: tuple[int, int, int, int]  # (t1, t2, t3, t4); pairs {t1,t2} and {t3,t4}
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "externals", tuple(int(t) for t in self.externals))
        self.validate()

    @property
    def bipartition(self):
        t1, t2, t3, t4 = self.externals
        return (frozenset((t1, t2)), frozenset((t3, t4)))

    @property
    def internal_count(self) -> int:
        return self.graph.vertex_count - 4

    def validate(self):
        g = self.graph
        if len(set(self.externals)) != 4:
            raise KernelError("need four distinct external vertices")
        for t in self.externals:
            if not 0 <= t < g.vertex_count:
                raise KernelError(f"external vertex {t} out of range")
        ext = set(self.externals)
        for v, d in enumerate(g.degrees()):
            want = 2 if v in ext else 4
            if d != want:
                raise KernelError(f"vertex {v} has degree {d}, expected {want}")
        for t, h, l in g.edges:
            if t == h:
                raise KernelError(f"edge {l} is a self-loop")
            if l in (EDGE1, EDGE2) or (len(l) > 2 and l[0] in HOURGLASS_LETTERS and l[1] == "_"):
                raise KernelError(f"edge label {l!r} is reserved")
        t1, t2, t3, t4 = self.externals
        if not g.add_edge(t1, t2, EDGE1).add_edge(t3, t4, EDGE2).is_connected():
            raise KernelError("kernel with its two extra edges is disconnected")

    def with_pairs(self, pairing: tuple[int, int, int, int]) -> KernelSpec:
        return KernelSpec(self.graph, pairing, self.name)

    def to_text(self) -> str:
        t1, t2, t3, t4 = self.externals
        head = f"# kernel {self.name}\n" if self.name else ""
        return head + to_edge_list(self.graph) + f"x {t1} {t2} | {t3} {t4}\n"


def parse_kernel_text(text: str, name: str = "") -> KernelSpec:
    g, extra = parse_graph_text(text)
    if len(extra) != 1:
        raise GraphFormatError("kernel file needs exactly one 'x t1 t2 | t3 t4' line")
    body = extra[0][1:].replace("|", " | ").split()
    if len(body) != 5 or body[2] != "|":
        raise GraphFormatError("externals line must read 'x t1 t2 | t3 t4'")
    try:
        ts = tuple(int(body[i]) for i in (0, 1, 3, 4))
    except ValueError:
        raise GraphFormatError("external vertices must be integers") from None
    return KernelSpec(g, ts, name)


def read_kernel(path) -> KernelSpec:
    from pathlib import Path
    p = Path(path)
    return parse_kernel_text(p.read_text(), p.stem)


# ---------------------------------------------------------------------------
# chains


@dataclass(frozen=True)
class HourglassFrame:
    index: int
    vertices: dict  # letter in m,w,x,y,z -> vertex id
    edges: dict  # letter in a..f -> edge label


@dataclass(frozen=True)
class HourglassChain:
    graph: Multigraph
    frames: tuple[HourglassFrame, ...]
    decompletion_vertex: int | None
    twist: bool

    def decompleted(self) -> Multigraph:
        if self.decompletion_vertex is None:
            raise ValueError("chains shorter than 3 have no vertex between hourglasses 2 and 3")
        return self.graph.delete_vertex(self.decompletion_vertex)


def hourglass_label(letter: str, i: int) -> str:
    return f"{letter}_{i}"


def build_chain(kernel: KernelSpec, length: int, twist: bool = False) -> HourglassChain:
    if length < 1:
        raise ValueError("chain length must be at least 1")
    kernel.validate()
    t1, t2, t3, t4 = kernel.externals
    nv = kernel.graph.vertex_count
    edges = list(kernel.graph.edges)
    frames = []
    bottom = (t1, t2)
    for i in range(1, length + 1):
        m = nv
        nv += 1
        if i < length:
            top = (nv, nv + 1)
            nv += 2
        else:
            top = (t4, t3) if twist else (t3, t4)
        w, y = bottom
        x, z = top
        ends = {"a": (w, x), "b": (m, x), "c": (m, w), "d": (m, z), "e": (m, y), "f": (y, z)}
        labels = {}
        for letter in HOURGLASS_LETTERS:
            lab = hourglass_label(letter, i)
            edges.append((*ends[letter], lab))
            labels[letter] = lab
        frames.append(HourglassFrame(i, {"m": m, "w": w, "x": x, "y": y, "z": z}, labels))
        bottom = top
    g = Multigraph(nv, tuple(edges))
    if any(d != 4 for d in g.degrees()):
        raise InternalCheckError("hourglass chain is not 4-regular")
    v = frames[1].vertices["x"] if length >= 3 else None
    return HourglassChain(g, tuple(frames), v, twist)


def build_Kprime(kernel: KernelSpec) -> Multigraph:
    t1, t2, t3, t4 = kernel.externals
    return kernel.graph.add_edge(t1, t2, EDGE1).add_edge(t3, t4, EDGE2)


# ---------------------------------------------------------------------------
# kernel Dodgsons


@dataclass
class KernelPolys:
    """The Dodgson polynomials of K' that appear in the formulas."""

    psi12: IntPoly  # Psi^{1,2}_{K'}
    d22: IntPoly  # Psi^{2,2}_{K'}
    psi_2: IntPoly  # Psi_{K',2}
    d22_1: IntPoly  # Psi^{2,2}_{K',1}
    d1212: IntPoly  # Psi^{12,12}_{K'}
    psi_12: IntPoly  # Psi_{K',12}
    d11_2: IntPoly  # Psi^{1,1}_{K',2}
    kernel_edges: tuple[str, ...]


def kernel_polys(kernel: KernelSpec) -> KernelPolys:
    Kp = build_Kprime(kernel)
    one, two = (EDGE1,), (EDGE2,)
    kp = KernelPolys(
        psi12=dodgson(Kp, I=one, J=two),
        d22=dodgson(Kp, I=two, J=two),
        psi_2=dodgson(Kp, K=two),
        d22_1=dodgson(Kp, I=two, J=two, K=one),
        d1212=dodgson(Kp, I=one + two, J=one + two),
        psi_12=dodgson(Kp, K=one + two),
        d11_2=dodgson(Kp, I=one, J=one, K=two),
        kernel_edges=kernel.graph.labels,
    )
    if kp.d1212.is_zero():
        return kp  # K is disconnected; nothing to check
    d = kp.d1212.total_degree()
    for name, want in (("d22_1", d + 1), ("psi12", d + 1), ("d11_2", d + 1), ("psi_12", d + 2)):
        p = getattr(kp, name)
        if not p.is_zero() and (p.total_degree() != want or not p.is_homogeneous()):
            raise InternalCheckError(f"degree bookkeeping failed for {name}")
    return kp


def theorem_rhs_factors(kernel: KernelSpec) -> list[tuple[IntPoly, int]]:
    """alpha_1 (Psi^{1,2}_{K'})^2 Psi^{2,2}_{K'} Psi_{K',2} as a factor list."""
    kp = kernel_polys(kernel)
    factors = [(IntPoly.var(EDGE1), 1), (kp.psi12, 2), (kp.d22, 1), (kp.psi_2, 1)]
    for f, _ in factors:
        if EDGE2 in f.vars:
            raise InternalCheckError("alpha_2 occurs in the kernel formula")
    return factors


def theorem_rhs(kernel: KernelSpec) -> IntPoly:
    out = IntPoly.const(1)
    for f, m in theorem_rhs_factors(kernel):
        out = out * f**m
    return out


def rhs_variables(kernel: KernelSpec) -> list[str]:
    return [EDGE1] + list(kernel.graph.labels)


def rhs_invariant(kernel: KernelSpec):
    return make_invariant(1, theorem_rhs_factors(kernel), (), QUADRATIC, tuple(rhs_variables(kernel)))


def _size(inv) -> tuple[int, int]:
    sizes = [len(f) for f, _ in inv.factors] or [0]
    return max(sizes), sum(sizes)


def greedy_reduce(inv, variables: Sequence[str] | None = None, factor: bool = True):
    """Quadratic steps until none applies; returns (invariant, reduced variables).

    Each round tries every remaining variable and keeps the step whose result
    has the smallest largest factor (then fewest terms in total), ties going
    to the first variable in sorted order.  With ``factor`` the kept result is
    split into irreducible factors, which is what lets later steps apply.
    """
    if factor:
        inv = factor_invariant(inv)
    done: list[str] = []
    while not isinstance(inv, WeightDrop):
        cands = sorted(variables if variables is not None else inv.remaining)
        best = None
        for x in cands:
            if x not in inv.remaining:
                continue
            res = quadratic_step(inv, x)
            if isinstance(res, Stuck):
                continue
            if isinstance(res, WeightDrop):
                best = (x, res, (-1, -1))
                break
            score = _size(res)
            if best is None or score < best[2]:
                best = (x, res, score)
        if best is None:
            break
        done.append(best[0])
        inv = factor_invariant(best[1]) if factor else best[1]
    return inv, done


_PRE_CACHE: dict[str, tuple] = {}


def reduced_rhs(kernel: KernelSpec):
    """Pre-reduced kernel formula (invariant, reduced variables), cached per kernel text."""
    key = kernel.to_text()
    if key not in _PRE_CACHE:
        _PRE_CACHE[key] = greedy_reduce(rhs_invariant(kernel))
    return _PRE_CACHE[key]


@dataclass
class HourglassResult:
    residue: int
    reduced: list[str] = field(default_factory=list)
    final: object = None
    legendre: int | None = None


def c2_hourglass_detail(kernel: KernelSpec, fld: FieldSpec, pre_reduce: bool = True, *,
                        budget=DEFAULT_BUDGET, workers=1, stats: SumStats | None = None) -> HourglassResult:
    q = fld.q
    if q == 2:
        # the last-hourglass expression is a multiple of 2, so its sum vanishes mod 2
        before, _, _ = endgame_expressions(kernel)
        if not vanishes_mod2(before):
            raise InternalCheckError("last-hourglass expression does not vanish mod 2")
        return HourglassResult(0)
    if q % 2 == 0:
        raise ValueError("the kernel formula needs q odd or q = 2")
    if pre_reduce:
        inv, done = reduced_rhs(kernel)
    else:
        inv, done = rhs_invariant(kernel), []
    if isinstance(inv, WeightDrop):
        return HourglassResult(0, done, inv, 0)
    s = legendre_sum(inv.factor_list(), fld, list(inv.remaining), budget=budget, workers=workers,
                     stats=stats)
    # each quadratic step flips the sign mod q
    return HourglassResult(((-1) ** len(done) * s) % q, done, inv, s)


def c2_hourglass(kernel: KernelSpec, fld: FieldSpec, pre_reduce: bool = True, *,
                 budget=DEFAULT_BUDGET, workers=1) -> int:
    """c2^{(q)} of the decompleted chain, from the kernel alone."""
    return c2_hourglass_detail(kernel, fld, pre_reduce, budget=budget, workers=workers).residue


# ---------------------------------------------------------------------------
# endgame


def hourglass_YZ(b, c, d, e, f):
    Y = b * c * d + b * c * e + b * d * e + c * d * e + b * c * f + b * e * f
    Z = b * c * d + b * c * e + b * d * e + c * d * e + b * c * f + c * d * f
    return Y, Z


def endgame_expressions(kernel: KernelSpec):
    """Factor lists of the last-hourglass expression and of its rescaled form.

    Both are in the variables b_1..f_1 and the kernel edges.
    """
    kp = kernel_polys(kernel)
    b, c, d, e, f = (IntPoly.var(hourglass_label(l, 1)) for l in "bcdef")
    S = d + e + f
    Y, Z = hourglass_YZ(b, c, d, e, f)
    before = [(IntPoly.const(-4), 1), (c, 1), (S, 1), (Z, 1), (kp.psi12, 2),
              (kp.d22_1 * S * b + kp.d1212 * Y, 1), (kp.psi_12 * S * b + kp.d11_2 * Y, 1)]
    after = [(IntPoly.const(-1), 1), (b, 1), (S, 2), (Y, 1), (Z, 1), (kp.psi12, 2),
             (kp.d22_1 + c * kp.d1212, 1), (kp.psi_12 + c * kp.d11_2, 1)]
    variables = [hourglass_label(l, 1) for l in "bcdef"] + list(kernel.graph.labels)
    return before, after, variables


def vanishes_mod2(factors) -> bool:
    """Some factor has only even coefficients (so the product is 0 over F_2)."""
    return any(f.content() % 2 == 0 for f, _ in factors)


@dataclass
class EndgameReport:
    q: int
    before: int
    after: int
    reduced_sum: int
    rhs_sum: int
    mod2_vanishes: bool
    steps: list[str]

    @property
    def sums_equal(self) -> bool:
        return self.before == self.after

    @property
    def reduction_consistent(self) -> bool:
        # four quadratic steps: (-1)^4
        return (self.after - self.reduced_sum) % self.q == 0

    @property
    def matches_rhs(self) -> bool:
        return (self.reduced_sum - self.rhs_sum) % self.q == 0

    @property
    def ok(self) -> bool:
        return self.sums_equal and self.reduction_consistent and self.matches_rhs and self.mod2_vanishes

    def to_text(self) -> str:
        return (f"q={self.q} before={self.before} after={self.after} equal={self.sums_equal}\n"
                f"reduced({','.join(self.steps)})={self.reduced_sum} rhs={self.rhs_sum} "
                f"consistent={self.reduction_consistent} matches_rhs={self.matches_rhs} "
                f"mod2_vanishes={self.mod2_vanishes}\n")


def endgame_check(kernel: KernelSpec, fld: FieldSpec, *, budget=DEFAULT_BUDGET, workers=1) -> EndgameReport:
    q = fld.q
    if q % 2 == 0:
        raise ValueError("endgame check needs odd q")
    before, after, variables = endgame_expressions(kernel)
    s_before = legendre_sum(before, fld, variables, budget=budget, workers=workers)
    s_after = legendre_sum(after, fld, variables, budget=budget, workers=workers)
    mod2 = vanishes_mod2(before)
    inv = make_invariant(1, after, (), QUADRATIC, tuple(variables))
    steps = []
    for letter in "fedb":
        x = hourglass_label(letter, 1)
        res = quadratic_step(inv, x)
        if isinstance(res, Stuck):
            raise InternalCheckError(f"endgame reduction stuck at {x}: {res.reason}")
        inv = res
        steps.append(x)
    if isinstance(inv, WeightDrop):
        s_red = 0
    else:
        s_red = legendre_sum(inv.factor_list(), fld, list(inv.remaining), budget=budget, workers=workers)
    rhs = legendre_sum(theorem_rhs_factors(kernel), fld, rhs_variables(kernel), budget=budget, workers=workers)
    return EndgameReport(q, s_before, s_after, s_red, rhs, mod2, steps)


# ---------------------------------------------------------------------------
# experiment: reducing the two kernel edges at an end of edge 2


@dataclass
class EdgeTwoExperiment:
    vertex: int
    edges: tuple[str, str]
    factored: bool
    outcome: str  # "reduced", "weight drop" or "stuck at <edge>: <reason>"
    result: object = None

    def to_text(self) -> str:
        head = (f"vertex {self.vertex} edges {self.edges[0]},{self.edges[1]} "
                f"({'with' if self.factored else 'without'} factoring): {self.outcome}\n")
        if isinstance(self.result, FactoredInvariant):
            head += self.result.to_text() + "\n"
        return head


def edge_two_experiment(kernel: KernelSpec, factor: bool = True) -> list[EdgeTwoExperiment]:
    """Try to reduce the kernel formula in the two kernel edges at each end of edge 2.

    Answers the open question only case by case: nothing here is asserted.
    """
    out = []
    t3, t4 = kernel.externals[2:]
    base = rhs_invariant(kernel)
    if factor:
        base = factor_invariant(base)
    for v in (t3, t4):
        e3, e4 = [l for t, h, l in kernel.graph.edges if v in (t, h)]
        inv, outcome = base, "reduced"
        for x in (e3, e4):
            res = quadratic_step(inv, x)
            if isinstance(res, Stuck):
                outcome = f"stuck at {x}: {res.reason}"
                break
            inv = factor_invariant(res) if factor else res
            if isinstance(inv, WeightDrop):
                outcome = "weight drop"
                break
        out.append(EdgeTwoExperiment(v, (e3, e4), factor, outcome, inv))
    return out
