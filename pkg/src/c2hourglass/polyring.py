"""Sparse multivariate polynomials with exact integer coefficients.

Monomials are packed into a single Python int.  For a polynomial in the
sorted variables ``v_0 < v_1 < ... < v_{n-1}`` the exponent of ``v_i`` lives in
a 16-bit field at offset ``16 * (n - 1 - i)`` and the total degree sits above
all fields.  With that layout

* multiplying monomials is integer addition, and
* graded lexicographic order is plain integer order,

so the leading term of a polynomial is ``max(terms)``.
"""

from __future__ import annotations

import math
from itertools import permutations
from typing import Iterable, Mapping, Sequence

FIELD_BITS = 16
FIELD_MASK = (1 << FIELD_BITS) - 1
MAX_EXPONENT = (1 << (FIELD_BITS - 1)) - 1  # top bit of each field is a borrow guard


def _shift(nvars: int, i: int) -> int:
    return FIELD_BITS * (nvars - 1 - i)


def _guard_mask(nvars: int) -> int:
    g = 0
    for i in range(nvars):
        g |= 1 << (_shift(nvars, i) + FIELD_BITS - 1)
    return g


def pack(exponents: Sequence[int]) -> int:
    n = len(exponents)
    key = 0
    deg = 0
    for i, e in enumerate(exponents):
        if e < 0 or e > MAX_EXPONENT:
            raise ValueError(f"exponent {e} out of range")
        key |= e << _shift(n, i)
        deg += e
    return key | (deg << (FIELD_BITS * n))


def unpack(key: int, nvars: int) -> tuple[int, ...]:
    return tuple((key >> _shift(nvars, i)) & FIELD_MASK for i in range(nvars))


class PolyError(ArithmeticError):
    pass


class IntPoly:
    """Immutable sparse polynomial over Z.

    ``vars`` is the sorted tuple of variables that actually occur; ``terms``
    maps packed monomials to nonzero integer coefficients.
    """

    __slots__ = ("vars", "terms", "_hash", "_maxexp")

    def __init__(self, vars: Sequence[str] = (), terms: Mapping[int, int] | None = None,
                 _normalized: bool = False):
        vars = tuple(vars)
        terms = {k: c for k, c in (terms or {}).items() if c}
        if not _normalized:
            if list(vars) != sorted(set(vars)):
                raise ValueError("variables must be sorted and unique")
            vars, terms = _drop_unused(vars, terms)
        self.vars = vars
        self.terms = terms
        self._hash = None
        self._maxexp = None

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, c: int) -> IntPoly:
        return cls((), {0: c} if c else {}, _normalized=True)

    @classmethod
    def var(cls, name: str) -> IntPoly:
        return cls((name,), {pack((1,)): 1}, _normalized=True)

    @classmethod
    def from_dict(cls, d: Mapping[Sequence[tuple[str, int]] | tuple, int]) -> IntPoly:
        """Build from ``{((var, exp), ...): coeff}``."""
        names = sorted({v for mono in d for v, e in mono if e})
        idx = {v: i for i, v in enumerate(names)}
        terms: dict[int, int] = {}
        for mono, c in d.items():
            exps = [0] * len(names)
            for v, e in mono:
                if e:
                    exps[idx[v]] += e
            k = pack(exps)
            terms[k] = terms.get(k, 0) + c
        return cls(names, terms)

    # -- basic queries ------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.vars

    def constant_value(self) -> int:
        if self.vars:
            raise PolyError("polynomial is not constant")
        return self.terms.get(0, 0)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> Iterable[tuple[tuple[int, ...], int]]:
        n = len(self.vars)
        for k, c in self.terms.items():
            yield unpack(k, n), c

    def monomials(self) -> dict[tuple[tuple[str, int], ...], int]:
        out = {}
        for exps, c in self.items():
            out[tuple((v, e) for v, e in zip(self.vars, exps) if e)] = c
        return out

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(self.terms) >> (FIELD_BITS * len(self.vars))

    def min_total_degree(self) -> int:
        if not self.terms:
            return -1
        return min(self.terms) >> (FIELD_BITS * len(self.vars))

    def is_homogeneous(self) -> bool:
        return self.total_degree() == self.min_total_degree()

    def degree(self, x: str) -> int:
        if x not in self.vars:
            return 0 if self.terms else -1
        s = _shift(len(self.vars), self.vars.index(x))
        return max((k >> s) & FIELD_MASK for k in self.terms)

    def max_exponent(self) -> int:
        if self._maxexp is None:
            n = len(self.vars)
            acc = 0
            for k in self.terms:
                for i in range(n):
                    e = (k >> _shift(n, i)) & FIELD_MASK
                    if e > acc:
                        acc = e
            self._maxexp = acc
        return self._maxexp

    def leading_term(self) -> tuple[int, int]:
        k = max(self.terms)
        return k, self.terms[k]

    def content(self) -> int:
        g = 0
        for c in self.terms.values():
            g = math.gcd(g, c)
        return g

    # -- alignment ----------------------------------------------------
    def _lift(self, target: tuple[str, ...]) -> dict[int, int]:
        if target == self.vars:
            return self.terms
        n, m = len(self.vars), len(target)
        pos = [target.index(v) for v in self.vars]
        out = {}
        for k, c in self.terms.items():
            nk = (k >> (FIELD_BITS * n)) << (FIELD_BITS * m)
            for i, j in enumerate(pos):
                nk |= ((k >> _shift(n, i)) & FIELD_MASK) << _shift(m, j)
            out[nk] = c
        return out

    @staticmethod
    def _union(a: IntPoly, b: IntPoly) -> tuple[str, ...]:
        if a.vars == b.vars:
            return a.vars
        return tuple(sorted(set(a.vars) | set(b.vars)))

    # -- arithmetic ---------------------------------------------------
    @staticmethod
    def _coerce(other) -> IntPoly:
        if isinstance(other, IntPoly):
            return other
        if isinstance(other, int):
            return IntPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        u = self._union(self, other)
        out = dict(self._lift(u))
        for k, c in other._lift(u).items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return IntPoly(u, out)

    __radd__ = __add__

    def __neg__(self) -> IntPoly:
        return IntPoly(self.vars, {k: -c for k, c in self.terms.items()}, _normalized=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return IntPoly.const(0)
        if not other.vars:
            c = other.terms[0]
            return IntPoly(self.vars, {k: v * c for k, v in self.terms.items()}, _normalized=True)
        if not self.vars:
            return other * self
        if self.max_exponent() + other.max_exponent() > MAX_EXPONENT:
            raise OverflowError("exponent overflow in polynomial product")
        u = self._union(self, other)
        a, b = self._lift(u), other._lift(u)
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, int] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return IntPoly(u, out, _normalized=(u == self.vars == other.vars))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> IntPoly:
        if n < 0:
            raise ValueError("negative power")
        result = IntPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c: int) -> IntPoly:
        if not c:
            return IntPoly.const(0)
        return IntPoly(self.vars, {k: v * c for k, v in self.terms.items()}, _normalized=True)

    def exact_div_int(self, c: int) -> IntPoly:
        out = {}
        for k, v in self.terms.items():
            qv, r = divmod(v, c)
            if r:
                raise PolyError(f"coefficient {v} not divisible by {c}")
            out[k] = qv
        return IntPoly(self.vars, out, _normalized=True)

    # -- comparison ---------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = IntPoly.const(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    # -- structural operations ----------------------------------------
    def coefficients_in(self, x: str) -> dict[int, IntPoly]:
        """Split ``self = sum_k C_k x^k``; returns ``{k: C_k}`` without x."""
        if x not in self.vars:
            return {0: self} if self.terms else {}
        n = len(self.vars)
        i = self.vars.index(x)
        rest = self.vars[:i] + self.vars[i + 1:]
        s = _shift(n, i)
        buckets: dict[int, dict[int, int]] = {}
        for k, c in self.terms.items():
            e = (k >> s) & FIELD_MASK
            exps = unpack(k, n)
            nk = pack(exps[:i] + exps[i + 1:])
            buckets.setdefault(e, {})[nk] = c
        return {e: IntPoly(rest, t) for e, t in buckets.items()}

    def substitute(self, values: Mapping[str, int]) -> IntPoly:
        """Substitute integer values for some variables."""
        hit = [v for v in self.vars if v in values]
        if not hit:
            return self
        n = len(self.vars)
        keep = [i for i, v in enumerate(self.vars) if v not in values]
        rest = tuple(self.vars[i] for i in keep)
        vals = [(i, values[v]) for i, v in enumerate(self.vars) if v in values]
        out: dict[int, int] = {}
        for k, c in self.terms.items():
            exps = unpack(k, n)
            for i, a in vals:
                if exps[i]:
                    c *= a ** exps[i]
                    if not c:
                        break
            if not c:
                continue
            nk = pack([exps[i] for i in keep])
            out[nk] = out.get(nk, 0) + c
        return IntPoly(rest, out)

    def substitute_zero(self, xs: Iterable[str]) -> IntPoly:
        xs = set(xs) & set(self.vars)
        if not xs:
            return self
        n = len(self.vars)
        mask = 0
        for v in xs:
            mask |= FIELD_MASK << _shift(n, self.vars.index(v))
        kept = {k: c for k, c in self.terms.items() if not k & mask}
        return IntPoly(self.vars, kept)

    def rename(self, mapping: Mapping[str, str]) -> IntPoly:
        if not any(v in mapping for v in self.vars):
            return self
        d = {}
        for mono, c in self.monomials().items():
            d[tuple((mapping.get(v, v), e) for v, e in mono)] = c
        return IntPoly.from_dict(d)

    def evaluate(self, point: Mapping[str, int]) -> int:
        """Exact integer evaluation."""
        missing = [v for v in self.vars if v not in point]
        if missing:
            raise KeyError(f"no value for {missing}")
        vals = [point[v] for v in self.vars]
        total = 0
        for exps, c in self.items():
            t = c
            for a, e in zip(vals, exps):
                if e:
                    t *= a ** e
            total += t
        return total

    def evaluate_mod(self, point, field):
        """Evaluate at field elements; coefficients are reduced into ``field``."""
        from .finitefield import FqElement

        missing = [v for v in self.vars if v not in point]
        if missing:
            raise KeyError(f"no value for {missing}")
        codes = [field.code(point[v]) for v in self.vars]
        acc = 0
        for exps, c in self.items():
            t = field.from_int(c)
            for a, e in zip(codes, exps):
                if e:
                    t = field.mul(t, field.pow(a, e))
            acc = field.add(acc, t)
        return FqElement(field, acc)

    # -- division and square roots ------------------------------------
    def divmod(self, other: IntPoly) -> tuple[IntPoly, IntPoly]:
        """Multivariate division by ``other`` in grlex order, over Z.

        Terms of the dividend whose monomial is not divisible by the leading
        monomial of ``other`` (or whose coefficient is not divisible by the
        leading coefficient) go to the remainder.
        """
        if not other.terms:
            raise ZeroDivisionError("polynomial division by zero")
        u = self._union(self, other)
        n = len(u)
        guard = _guard_mask(n)
        rem = dict(self._lift(u))
        div = other._lift(u)
        lk = max(div)
        lc = div[lk]
        quot: dict[int, int] = {}
        out_rem: dict[int, int] = {}
        while rem:
            k = max(rem)
            c = rem[k]
            diff = (k | guard) - lk
            if (diff & guard) == guard and c % lc == 0:
                mk = diff & ~guard
                # restore degree field: diff keeps it because guard sits below it
                mc = c // lc
                quot[mk] = quot.get(mk, 0) + mc
                for dk, dc in div.items():
                    t = mk + dk
                    v = rem.get(t, 0) - mc * dc
                    if v:
                        rem[t] = v
                    else:
                        rem.pop(t, None)
            else:
                out_rem[k] = c
                del rem[k]
        return IntPoly(u, quot), IntPoly(u, out_rem)

    def exact_div(self, other: IntPoly) -> IntPoly:
        if not other.vars:
            return self.exact_div_int(other.constant_value())
        q, r = self.divmod(other)
        if r:
            raise PolyError("inexact polynomial division")
        return q

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"IntPoly({to_text(self)!r})"


def _drop_unused(vars: tuple[str, ...], terms: dict[int, int]):
    n = len(vars)
    if not n:
        return vars, terms
    acc = 0
    for k in terms:
        acc |= k
    used = [i for i in range(n) if (acc >> _shift(n, i)) & FIELD_MASK]
    if len(used) == n:
        return vars, terms
    nv = tuple(vars[i] for i in used)
    out = {}
    for k, c in terms.items():
        exps = unpack(k, n)
        out[pack([exps[i] for i in used])] = c
    return nv, out


# ---------------------------------------------------------------------------
# module-level operations


def poly(expr: str) -> IntPoly:
    """Parse the canonical text form (and simple variants) into an IntPoly.

    Accepts sums of terms like ``-3*a^2*b``, ``+a1*b1``, ``7``; ``·`` is
    accepted as a multiplication sign.
    """
    s = expr.replace("·", "*").strip()
    if not s:
        raise ValueError("empty polynomial")
    d: dict[tuple, int] = {}
    terms = []
    cur = ""
    bracket = False
    for ch in s:
        if bracket:
            bracket = ch != "]"
            cur += ch
        elif ch == " ":
            continue
        elif ch in "+-" and cur and cur[-1] not in "^*":
            terms.append(cur)
            cur = ch
        else:
            bracket = ch == "["
            cur += ch
    terms.append(cur)
    for t in terms:
        sign = 1
        while t and t[0] in "+-":
            if t[0] == "-":
                sign = -sign
            t = t[1:]
        coeff = sign
        mono: dict[str, int] = {}
        for f in t.split("*"):
            if not f:
                raise ValueError(f"malformed term in {expr!r}")
            if f.isdigit():
                coeff *= int(f)
                continue
            if "^" in f:
                name, e = f.split("^")
                e = int(e)
            else:
                name, e = f, 1
            if name.startswith("[") and name.endswith("]") and len(name) > 2:
                name = name[1:-1]
            elif not name.isidentifier():
                raise ValueError(f"bad variable name {name!r}")
            mono[name] = mono.get(name, 0) + e
        key = tuple(sorted(mono.items()))
        d[key] = d.get(key, 0) + coeff
    return IntPoly.from_dict(d)


def _name(v: str) -> str:
    return v if v.isidentifier() else f"[{v}]"


def to_text(p: IntPoly) -> str:
    """Canonical text: terms in decreasing grlex order, ``±c*x^i*y^j``."""
    if not p.terms:
        return "0"
    n = len(p.vars)
    out = []
    for k in sorted(p.terms, reverse=True):
        c = p.terms[k]
        exps = unpack(k, n)
        factors = [_name(v) if e == 1 else f"{_name(v)}^{e}" for v, e in zip(p.vars, exps) if e]
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not factors:
            body = str(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = str(a) + "*" + "*".join(factors)
        out.append(sign + body)
    s = "".join(out)
    return s[1:] if s.startswith("+") else s


def arith(p: IntPoly, q: IntPoly, op: str) -> IntPoly:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown op {op!r}")


def coeff_split(p: IntPoly, x: str) -> tuple[IntPoly, IntPoly, IntPoly]:
    """Return ``(A2, A1, A0)`` with ``p = A2*x^2 + A1*x + A0``."""
    parts = p.coefficients_in(x)
    if any(k > 2 for k in parts):
        raise PolyError(f"degree of {x} exceeds 2")
    zero = IntPoly.const(0)
    return parts.get(2, zero), parts.get(1, zero), parts.get(0, zero)


def substitute_zero(p: IntPoly, xs: Iterable[str]) -> IntPoly:
    return p.substitute_zero(xs)


def poly_sqrt(p: IntPoly) -> IntPoly | None:
    """Exact square root with positive leading coefficient, or None."""
    if not p.terms:
        return IntPoly.const(0)
    n = len(p.vars)
    lk, lc = p.leading_term()
    if lc <= 0:
        return None
    r0 = math.isqrt(lc)
    if r0 * r0 != lc:
        return None
    exps = unpack(lk, n)
    if any(e % 2 for e in exps):
        return None
    root_lk = pack([e // 2 for e in exps])
    root = {root_lk: r0}
    two_lc = 2 * r0
    min_key = min(p.terms)
    guard = _guard_mask(n)
    # remainder R = p - root^2, maintained incrementally
    rem = dict(p.terms)
    _acc_sub(rem, {2 * root_lk: lc})
    last = root_lk
    while rem:
        k = max(rem)
        c = rem[k]
        diff = (k | guard) - root_lk
        if (diff & guard) != guard or c % two_lc:
            return None
        t = diff & ~guard
        if t >= last or 2 * t < min_key:
            return None
        tc = c // two_lc
        # R -= 2*root*t + t^2
        upd = {}
        for rk, rc in root.items():
            upd[rk + t] = upd.get(rk + t, 0) + 2 * rc * tc
        upd[2 * t] = upd.get(2 * t, 0) + tc * tc
        _acc_sub(rem, upd)
        root[t] = tc
        last = t
    return IntPoly(p.vars, root)


def _acc_sub(acc: dict[int, int], sub: Mapping[int, int]) -> None:
    for k, c in sub.items():
        v = acc.get(k, 0) - c
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)


# ---------------------------------------------------------------------------
# determinants


def _as_poly(x) -> IntPoly:
    return x if isinstance(x, IntPoly) else IntPoly.const(int(x))


def det_cofactor(M: Sequence[Sequence]) -> IntPoly:
    """Leibniz expansion; only for small matrices (test oracle)."""
    n = len(M)
    if n == 0:
        return IntPoly.const(1)
    rows = [[_as_poly(x) for x in row] for row in M]
    total = IntPoly.const(0)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        t = IntPoly.const(-1 if inv % 2 else 1)
        for i, j in enumerate(perm):
            t = t * rows[i][j]
            if not t:
                break
        total = total + t
    return total


def det_polynomial(M: Sequence[Sequence], method: str = "bareiss") -> IntPoly:
    """Exact determinant of a square matrix over Z[vars].

    Unit constant pivots are eliminated first with plain Gaussian steps (exact
    because the pivot is +-1); the remaining block is handled by fraction-free
    Bareiss elimination with exact division, or by a division-free expansion
    over column subsets when ``method="expansion"``.
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("matrix is not square")
    A = [[_as_poly(x) for x in row] for row in M]
    sign = 1
    # unit pivots
    while A:
        m = len(A)
        rowcnt = [sum(1 for x in row if x) for row in A]
        colcnt = [sum(1 for r in range(m) if A[r][c]) for c in range(m)]
        piv = None
        best = None
        for i, row in enumerate(A):
            for j, x in enumerate(row):
                if x.vars or x.terms.get(0, 0) not in (1, -1):
                    continue
                cost = (rowcnt[i] - 1) * (colcnt[j] - 1)
                if best is None or cost < best:
                    best, piv = cost, (i, j)
                    if cost == 0:
                        break
            if best == 0:
                break
        if piv is None:
            break
        i, j = piv
        u = A[i][j].terms[0]
        if (i + j) % 2:
            sign = -sign
        sign *= u
        prow = A[i]
        newA = []
        for r in range(m):
            if r == i:
                continue
            f = A[r][j]
            row = A[r]
            if f:
                # row - f * u * prow  (u = 1/u for units)
                fu = f.scale(u)
                newrow = [row[c] - fu * prow[c] for c in range(m) if c != j]
            else:
                newrow = [row[c] for c in range(m) if c != j]
            newA.append(newrow)
        A = newA
    if not A:
        return IntPoly.const(sign)
    if method == "bareiss":
        d = _bareiss(A)
    elif method == "expansion":
        d = _subset_expansion(A)
    else:
        raise ValueError(f"unknown method {method!r}")
    return d.scale(sign)


def _bareiss(A: list[list[IntPoly]]) -> IntPoly:
    n = len(A)
    A = [list(r) for r in A]
    sign = 1
    prev = IntPoly.const(1)
    for k in range(n - 1):
        # pick the smallest nonzero pivot in column k
        cands = [(len(A[r][k]), r) for r in range(k, n) if A[r][k]]
        if not cands:
            return IntPoly.const(0)
        _, r = min(cands)
        if r != k:
            A[k], A[r] = A[r], A[k]
            sign = -sign
        pk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            for j in range(k + 1, n):
                num = pk * A[i][j] - aik * A[k][j]
                A[i][j] = num.exact_div(prev) if prev != 1 else num
            A[i][k] = IntPoly.const(0)
        prev = pk
    return A[n - 1][n - 1].scale(sign)


def _subset_expansion(A: list[list[IntPoly]]) -> IntPoly:
    n = len(A)
    # minors[S] = det of rows 0..|S|-1 and column set S (bitmask)
    minors = {0: IntPoly.const(1)}
    for r in range(n):
        nxt: dict[int, IntPoly] = {}
        for S, val in minors.items():
            if not val:
                continue
            for j in range(n):
                if S >> j & 1:
                    continue
                a = A[r][j]
                if not a:
                    continue
                # sign: number of chosen columns greater than j
                above = bin(S >> (j + 1)).count("1")
                t = val * a
                if above % 2:
                    t = -t
                T = S | (1 << j)
                nxt[T] = nxt[T] + t if T in nxt else t
        minors = nxt
    return minors.get((1 << n) - 1, IntPoly.const(0))


def factor_poly(p: IntPoly) -> list[tuple[IntPoly, int]]:
    """Irreducible factorization over Z as (factor, multiplicity) pairs.

    The integer content comes first as a constant factor when it is not 1.
    Uses sympy; binomials and constants are returned unchanged.
    """
    if p.is_constant() or len(p) <= 2 and p.total_degree() <= 1:
        return [(p, 1)]
    import sympy

    gens = sympy.symbols(list(p.vars))
    P = sympy.Poly.from_dict(dict(p.items()), *gens)
    c, parts = P.factor_list()
    out = [] if c == 1 else [(IntPoly.const(int(c)), 1)]
    for g, m in parts:
        names = [str(s) for s in g.gens]
        d = {tuple((names[i], e[i]) for i in range(len(names)) if e[i]): int(v) for e, v in g.as_dict().items()}
        out.append((IntPoly.from_dict(d), m))
    return out
