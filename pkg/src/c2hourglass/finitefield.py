"""Finite fields F_q (q <= 49), Legendre symbols, point counts and Legendre sums.

Field elements are integer codes 0..q-1: the code of a0 + a1*x + ... is
a0 + a1*p + ..., so codes 0..p-1 are the prime field.  All arithmetic goes
through lookup tables, which the numba enumeration kernel shares.

Counting works on a factored polynomial F = prod f_i^{m_i}.  For a Legendre
sum only the parity of m_i matters: odd factors contribute their character,
even ones the indicator f_i != 0.  For a point count F vanishes iff some f_i
does.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np
from numba import njit

from .polyring import IntPoly

MAX_Q = 49
DEFAULT_BUDGET = 2 * 10**10


class BudgetExceeded(RuntimeError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


# ---------------------------------------------------------------------------
# F_p[x] helpers on coefficient lists (lowest degree first)


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = a[:]
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def _is_irreducible(modulus: Sequence[int], p: int) -> bool:
    k = len(modulus) - 1
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _pmod(list(modulus), list(low) + [1], p):
                return False
    return True


@dataclass(frozen=True, eq=False)
class FieldSpec:
    p: int
    k: int = 1
    modulus: tuple[int, ...] = (0, 1)  # coefficients, lowest degree first, monic

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.k < 1:
            raise ValueError("field degree must be >= 1")
        if self.p ** self.k > MAX_Q:
            raise ValueError(f"q = {self.p ** self.k} exceeds the supported maximum {MAX_Q}")
        if self.k > 1:
            if len(self.modulus) != self.k + 1 or self.modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree k")
            if not _is_irreducible(self.modulus, self.p):
                raise ValueError("modulus is reducible")

    @property
    def q(self) -> int:
        return self.p ** self.k

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __repr__(self):
        return f"FieldSpec(q={self.q})"

    # -- tables -------------------------------------------------------
    @property
    def tables(self) -> "_Tables":
        return _tables(self)

    def add(self, a: int, b: int) -> int:
        return int(self.tables.add[a, b])

    def sub(self, a: int, b: int) -> int:
        t = self.tables
        return int(t.add[a, t.neg[b]])

    def mul(self, a: int, b: int) -> int:
        return int(self.tables.mul[a, b])

    def neg(self, a: int) -> int:
        return int(self.tables.neg[a])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return int(self.tables.inv[a])

    def pow(self, a: int, e: int) -> int:
        r = 1
        b = a
        while e:
            if e & 1:
                r = self.mul(r, b)
            b = self.mul(b, b)
            e >>= 1
        return r

    def from_int(self, c: int) -> int:
        return c % self.p

    def code(self, x) -> int:
        if isinstance(x, FqElement):
            if x.field != self:
                raise ValueError("element belongs to a different field")
            return x.code
        return self.from_int(int(x))

    def element(self, x) -> "FqElement":
        return FqElement(self, self.code(x))

    def elements(self) -> list["FqElement"]:
        return [FqElement(self, c) for c in range(self.q)]


@dataclass(frozen=True)
class _Tables:
    add: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    inv: np.ndarray
    chi: np.ndarray  # quadratic character (odd q); for even q all ones except 0
    pow: np.ndarray  # pow[a, e] for e < POW_COLUMNS


POW_COLUMNS = 64


@lru_cache(maxsize=None)
def _tables(F: FieldSpec) -> _Tables:
    p, k, q = F.p, F.k, F.q

    def digits(c):
        return [(c // p**i) % p for i in range(k)]

    def undigits(d):
        return sum(x * p**i for i, x in enumerate(d))

    add = np.zeros((q, q), dtype=np.int64)
    mul = np.zeros((q, q), dtype=np.int64)
    D = [digits(c) for c in range(q)]
    for a in range(q):
        for b in range(q):
            add[a, b] = undigits([(x + y) % p for x, y in zip(D[a], D[b])])
            if k == 1:
                mul[a, b] = a * b % p
            else:
                prod = [0] * (2 * k - 1)
                for i, x in enumerate(D[a]):
                    if x:
                        for j, y in enumerate(D[b]):
                            prod[i + j] = (prod[i + j] + x * y) % p
                r = _pmod(prod, list(F.modulus), p)
                mul[a, b] = undigits(r + [0] * (k - len(r)))
    neg = np.array([int(np.where(add[a] == 0)[0][0]) for a in range(q)], dtype=np.int64)
    inv = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        inv[a] = int(np.where(mul[a] == 1)[0][0])
    powt = np.zeros((q, POW_COLUMNS), dtype=np.int64)
    for a in range(q):
        r = 1
        for e in range(POW_COLUMNS):
            powt[a, e] = r
            r = mul[r, a]
    chi = np.zeros(q, dtype=np.int64)
    if q % 2:
        squares = {int(mul[a, a]) for a in range(1, q)}
        for a in range(1, q):
            chi[a] = 1 if a in squares else -1
    else:
        chi[1:] = 1
    return _Tables(add, mul, neg, inv, chi, powt)


@dataclass(frozen=True)
class FqElement:
    field: FieldSpec
    code: int

    def _other(self, o) -> int:
        return self.field.code(o)

    def __add__(self, o):
        return FqElement(self.field, self.field.add(self.code, self._other(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return FqElement(self.field, self.field.sub(self.code, self._other(o)))

    def __rsub__(self, o):
        return FqElement(self.field, self.field.sub(self._other(o), self.code))

    def __mul__(self, o):
        return FqElement(self.field, self.field.mul(self.code, self._other(o)))

    __rmul__ = __mul__

    def __neg__(self):
        return FqElement(self.field, self.field.neg(self.code))

    def __pow__(self, e: int):
        if e < 0:
            return FqElement(self.field, self.field.pow(self.field.inv(self.code), -e))
        return FqElement(self.field, self.field.pow(self.code, e))

    def inverse(self):
        return FqElement(self.field, self.field.inv(self.code))

    def __truediv__(self, o):
        return self * FqElement(self.field, self._other(o)).inverse()

    def __eq__(self, o):
        if isinstance(o, FqElement):
            return self.field == o.field and self.code == o.code
        if isinstance(o, int):
            return self.code == self.field.from_int(o)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.code))

    def __bool__(self):
        return self.code != 0

    def coefficients(self) -> tuple[int, ...]:
        p = self.field.p
        return tuple((self.code // p**i) % p for i in range(self.field.k))

    def __repr__(self):
        return f"F{self.field.q}({self.code})"


def build_field(p: int, k: int = 1) -> FieldSpec:
    """F_{p^k} with the lexicographically least monic irreducible modulus.

    Candidates x^k + c_{k-1} x^{k-1} + ... + c_0 are ordered by
    (c_{k-1}, ..., c_0).
    """
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if k == 1:
        return FieldSpec(p, 1, (0, 1))
    if p**k > MAX_Q:
        raise ValueError(f"q = {p**k} exceeds the supported maximum {MAX_Q}")
    for high_first in itertools.product(range(p), repeat=k):
        mod = tuple(reversed(high_first)) + (1,)
        if _is_irreducible(mod, p):
            return FieldSpec(p, k, mod)
    raise AssertionError("no irreducible polynomial found")


def field_for_q(q: int) -> FieldSpec:
    for p in range(2, q + 1):
        if _is_prime(p):
            k = round(math.log(q, p))
            if p**k == q:
                return build_field(p, k)
    raise ValueError(f"{q} is not a prime power")


def legendre_symbol(a, field: FieldSpec) -> int:
    if field.q % 2 == 0:
        raise ValueError("Legendre symbol needs odd q")
    c = field.code(a)
    if c == 0:
        return 0
    r = field.pow(c, (field.q - 1) // 2)
    return 1 if r == 1 else -1


@dataclass(frozen=True)
class C2Prefix:
    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for q, r in self.entries:
            if not 0 <= r < q:
                raise ValueError(f"residue {r} not reduced mod {q}")

    def residues(self) -> list[int]:
        return [r for _, r in self.entries]

    def negated(self) -> list[int]:
        return [(-r) % q for q, r in self.entries]

    def to_csv(self) -> str:
        lines = ["q,residue,neg_residue"]
        lines += [f"{q},{r},{(-r) % q}" for q, r in self.entries]
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# naive reference sums (small inputs only)


def _factor_list(F) -> list[tuple[IntPoly, int]]:
    if isinstance(F, IntPoly):
        return [(F, 1)]
    return [(f, int(m)) for f, m in F]


def _all_vars(factors, variables) -> list[str]:
    vs = set()
    for f, _ in factors:
        vs |= set(f.vars)
    if variables is not None:
        extra = vs - set(variables)
        if extra:
            raise ValueError(f"variables {sorted(extra)} missing from the variable list")
        return list(variables)
    return sorted(vs)


def _eval_code(f: IntPoly, names: Sequence[str], point: Sequence[int], F: FieldSpec) -> int:
    t = F.tables
    idx = [names.index(v) for v in f.vars]
    acc = 0
    for exps, c in f.items():
        term = F.from_int(c)
        for i, e in zip(idx, exps):
            if e:
                term = int(t.mul[term, t.pow[point[i], e]]) if e < POW_COLUMNS else t.mul[term, F.pow(point[i], e)]
        acc = int(t.add[acc, term])
    return acc


def naive_point_count(F, field: FieldSpec, variables: Sequence[str] | None = None) -> int:
    factors = _factor_list(F)
    names = _all_vars(factors, variables)
    count = 0
    for pt in itertools.product(range(field.q), repeat=len(names)):
        if any(_eval_code(f, names, pt, field) == 0 for f, _ in factors):
            count += 1
    return count


def naive_legendre_sum(F, field: FieldSpec, variables: Sequence[str] | None = None) -> int:
    if field.q % 2 == 0:
        raise ValueError("Legendre sums need odd q")
    factors = _factor_list(F)
    names = _all_vars(factors, variables)
    chi = field.tables.chi
    total = 0
    for pt in itertools.product(range(field.q), repeat=len(names)):
        v = 1
        for f, m in factors:
            c = _eval_code(f, names, pt, field)
            v *= int(chi[c]) ** m if c else 0
            if not v:
                break
        total += v
    return total


# ---------------------------------------------------------------------------
# enumeration kernel

MODE_LEGENDRE = 0
MODE_COUNT = 1


@njit(cache=True, nogil=True)
def _enum_kernel(q, mode, use_tail, addt, mult, negt, invt, chit, powt, two, four,
                 fkind, mono_f, mono_c, mono_exp, mono_idx,
                 nslow, fast_dims, tdim, tensor_size, lo, hi):
    nf = fkind.shape[0]
    nm = mono_f.shape[0]
    L = fast_dims.shape[0]
    # sizes of the collapse levels
    sizes = np.empty(L + 1, dtype=np.int64)
    sizes[0] = tensor_size
    for j in range(L):
        sizes[j + 1] = sizes[j] // fast_dims[j]
    coll = np.zeros((L + 1, nf, tensor_size), dtype=np.int64)
    pp = np.zeros((nslow + 1, nm), dtype=np.int64)
    for m in range(nm):
        pp[0, m] = mono_c[m]
    xs = np.zeros(nslow, dtype=np.int64)
    ys = np.zeros(L, dtype=np.int64)
    R = np.zeros(3, dtype=np.int64)
    tmp = np.zeros(3, dtype=np.int64)
    total = 0

    if nslow > 0:
        xs[0] = lo
    start = 0  # lowest slow level whose partial products are stale
    while True:
        # refresh partial products for levels start..nslow-1
        for d in range(start, nslow):
            x = xs[d]
            for m in range(nm):
                e = mono_exp[m, d]
                v = pp[d, m]
                if e != 0 and v != 0:
                    v = mult[v, powt[x, e]]
                pp[d + 1, m] = v
        # assemble dense tensors
        for f in range(nf):
            for i in range(tensor_size):
                coll[0, f, i] = 0
        for m in range(nm):
            v = pp[nslow, m]
            if v != 0:
                f = mono_f[m]
                i = mono_idx[m]
                coll[0, f, i] = addt[coll[0, f, i], v]
        # fast odometer
        for j in range(L):
            ys[j] = 0
        fstart = 0
        while True:
            for j in range(fstart, L):
                y = ys[j]
                dim = fast_dims[j]
                sz = sizes[j + 1]
                for f in range(nf):
                    for r in range(sz):
                        acc = coll[j, f, (dim - 1) * sz + r]
                        for e in range(dim - 2, -1, -1):
                            acc = addt[mult[acc, y], coll[j, f, e * sz + r]]
                        coll[j + 1, f, r] = acc
            # evaluate one point of the remaining (tail) variable space
            if mode == 0:
                if use_tail == 0:
                    v = 1
                    for f in range(nf):
                        c = coll[L, f, 0]
                        if c == 0:
                            v = 0
                            break
                        if fkind[f] == 0:
                            v *= chit[c]
                    total += v
                else:
                    R[0] = 1
                    R[1] = 0
                    R[2] = 0
                    alive = True
                    rootmask = np.uint64(0)
                    for f in range(nf):
                        c0 = coll[L, f, 0]
                        c1 = coll[L, f, 1] if tdim > 1 else 0
                        c2 = coll[L, f, 2] if tdim > 2 else 0
                        if fkind[f] == 0:
                            for i in range(3):
                                tmp[i] = 0
                            for i in range(3):
                                if R[i] != 0:
                                    tmp[i] = addt[tmp[i], mult[R[i], c0]]
                                    if i + 1 < 3:
                                        tmp[i + 1] = addt[tmp[i + 1], mult[R[i], c1]]
                                    if i + 2 < 3:
                                        tmp[i + 2] = addt[tmp[i + 2], mult[R[i], c2]]
                            for i in range(3):
                                R[i] = tmp[i]
                        else:
                            if c1 == 0:
                                if c0 == 0:
                                    alive = False
                                    break
                            else:
                                r = mult[negt[c0], invt[c1]]
                                rootmask |= np.uint64(1) << np.uint64(r)
                    if alive:
                        a = R[2]
                        b = R[1]
                        c = R[0]
                        if a != 0:
                            disc = addt[mult[b, b], negt[mult[four, mult[a, c]]]]
                            if disc != 0:
                                s = -chit[a]
                            else:
                                s = (q - 1) * chit[a]
                        elif b != 0:
                            s = 0
                        else:
                            s = q * chit[c]
                        if rootmask != 0:
                            for r in range(q):
                                if (rootmask >> np.uint64(r)) & np.uint64(1):
                                    val = addt[addt[mult[a, mult[r, r]], mult[b, r]], c]
                                    s -= chit[val]
                        total += s
            else:
                if use_tail == 0:
                    for f in range(nf):
                        if coll[L, f, 0] == 0:
                            total += 1
                            break
                else:
                    allz = False
                    rootmask = np.uint64(0)
                    for f in range(nf):
                        c0 = coll[L, f, 0]
                        c1 = coll[L, f, 1]
                        if c1 == 0:
                            if c0 == 0:
                                allz = True
                                break
                        else:
                            r = mult[negt[c0], invt[c1]]
                            rootmask |= np.uint64(1) << np.uint64(r)
                    if allz:
                        total += q
                    else:
                        cnt = 0
                        while rootmask != 0:
                            rootmask &= rootmask - np.uint64(1)
                            cnt += 1
                        total += cnt
            # advance fast odometer
            j = L - 1
            while j >= 0:
                ys[j] += 1
                if ys[j] < q:
                    break
                ys[j] = 0
                j -= 1
            if j < 0:
                break
            fstart = j
        # advance slow odometer
        d = nslow - 1
        while d >= 0:
            xs[d] += 1
            if d == 0:
                if xs[d] < hi:
                    break
            elif xs[d] < q:
                break
            xs[d] = 0
            d -= 1
        if d < 0:
            break
        start = d
    return total


# ---------------------------------------------------------------------------
# planning


@dataclass
class SumStats:
    points: int = 0
    charts: int = 0
    kernel_calls: int = 0
    notes: list[str] = dc_field(default_factory=list)


def _tail_candidates(factors, kinds, free, mode):
    out = []
    for v in free:
        if mode == MODE_LEGENDRE:
            odd = sum(f.degree(v) for f, k in zip(factors, kinds) if k == 0)
            even_ok = all(f.degree(v) <= 1 for f, k in zip(factors, kinds) if k == 1)
            if odd <= 2 and even_ok:
                out.append(v)
        else:
            if all(f.degree(v) <= 1 for f in factors):
                out.append(v)
    return out


def _choose_fast(factors, outer, limit=512, max_fast=4):
    """Pick fast variables (dense collapse) among the outer ones."""
    deg = {v: max(f.degree(v) for f in factors) for v in outer}
    order = sorted(outer, key=lambda v: (deg[v], -_occurrences(factors, v), v))
    fast = []
    size = 1
    for v in order:
        if len(fast) >= max_fast or len(fast) >= len(outer):
            break
        if size * (deg[v] + 1) > limit:
            break
        fast.append(v)
        size *= deg[v] + 1
    return fast


def _occurrences(factors, v):
    """Number of monomials (over all factors) containing v."""
    n = 0
    for f in factors:
        if v in f.vars:
            n += sum(1 for e, c in f.coefficients_in(v).items() if e for _ in c.terms)
    return n


class _Runner:
    def __init__(self, field: FieldSpec, mode: int, accel: bool, budget: int, workers: int,
                 stats: SumStats):
        self.F = field
        self.mode = mode
        self.accel = accel
        self.budget = budget
        self.workers = max(1, workers)
        self.stats = stats

    def run(self, factors: list[IntPoly], kinds: list[int], free: list[str]) -> int:
        """Sum over F_q^free of the character (or zero indicator) of the factored polynomial."""
        F = self.F
        q = F.q
        present = set().union(*[set(f.vars) for f in factors])
        idle = [v for v in free if v not in present]
        if idle:
            return q ** len(idle) * self.run(factors, kinds, [v for v in free if v in present])
        tail = None
        if self.accel:
            cands = _tail_candidates(factors, kinds, free, self.mode)
            if cands:
                tail = max(cands, key=lambda v: (_occurrences(factors, v), v))
        outer = [v for v in free if v != tail]
        fast = _choose_fast(factors, outer) if outer else []
        slow = [v for v in outer if v not in fast]
        # keep slow variables with many monomials outermost? the order only affects refresh cost
        M = len(outer)
        npts = q**M
        self.stats.points += npts
        if self.stats.points > self.budget:
            raise BudgetExceeded(f"enumeration needs more than {self.budget} points")
        self.stats.kernel_calls += 1

        fast_dims = np.array([max(f.degree(v) for f in factors) + 1 for v in fast], dtype=np.int64)
        tdim = 1 if tail is None else max(f.degree(tail) for f in factors) + 1
        strides = []
        s = tdim
        for d in reversed(fast_dims.tolist()):
            strides.append(s)
            s *= d
        strides = list(reversed(strides))
        tensor_size = s
        mono_f, mono_c, mono_exp, mono_idx = [], [], [], []
        for fi, f in enumerate(factors):
            pos = {v: i for i, v in enumerate(f.vars)}
            for exps, c in f.items():
                cc = F.from_int(c)
                if cc == 0:
                    continue
                mono_f.append(fi)
                mono_c.append(cc)
                mono_exp.append([exps[pos[v]] if v in pos else 0 for v in slow])
                idx = 0
                for v, st in zip(fast, strides):
                    if v in pos:
                        idx += exps[pos[v]] * st
                if tail is not None and tail in pos:
                    idx += exps[pos[tail]]
                mono_idx.append(idx)
        if any(e >= POW_COLUMNS for row in mono_exp for e in row):
            raise ValueError("exponent too large for the enumeration kernel")
        if not mono_f:
            mono_exp_arr = np.zeros((0, len(slow)), dtype=np.int64)
        else:
            mono_exp_arr = np.array(mono_exp, dtype=np.int64).reshape(len(mono_f), len(slow))
        t = F.tables
        args = (q, self.mode, int(tail is not None), t.add, t.mul, t.neg, t.inv, t.chi, t.pow,
                F.from_int(2), F.from_int(4),
                np.array(kinds, dtype=np.int64), np.array(mono_f, dtype=np.int64),
                np.array(mono_c, dtype=np.int64), mono_exp_arr, np.array(mono_idx, dtype=np.int64),
                len(slow), fast_dims, tdim, tensor_size)
        if not slow:
            return int(_enum_kernel(*args, 0, 1))
        shards = min(self.workers, q)
        bounds = [(q * i // shards, q * (i + 1) // shards) for i in range(shards)]
        if shards == 1:
            return int(_enum_kernel(*args, 0, q))
        with ThreadPoolExecutor(shards) as ex:
            parts = list(ex.map(lambda b: int(_enum_kernel(*args, b[0], b[1])), bounds))
        return sum(parts)


def _prepare(F, field: FieldSpec, variables, mode):
    """Split into nonconstant factors and kinds; returns (const_factor, factors, kinds, names).

    const_factor: for Legendre sums the character of the constant part, for
    counts 0 if some constant factor vanishes mod p (then everything is a zero)
    and 1 otherwise.
    """
    factors = _factor_list(F)
    names = _all_vars(factors, variables)
    const = 1
    polys, kinds = [], []
    merged: dict[IntPoly, int] = {}
    for f, m in factors:
        if m <= 0:
            raise ValueError("multiplicities must be positive")
        if f.is_constant():
            c = field.from_int(f.constant_value())
            if c == 0:
                return 0, [], [], names
            if mode == MODE_LEGENDRE and m % 2:
                const *= int(field.tables.chi[c])
            continue
        # drop coefficients vanishing mod p
        red = IntPoly(f.vars, {k: v for k, v in f.terms.items() if v % field.p})
        if red.is_zero():
            return 0, [], [], names
        if red.is_constant():
            c = field.from_int(red.constant_value())
            if mode == MODE_LEGENDRE and m % 2:
                const *= int(field.tables.chi[c])
            continue
        merged[red] = merged.get(red, 0) + m
    for f, m in merged.items():
        polys.append(f)
        kinds.append(0 if (mode == MODE_LEGENDRE and m % 2) else 1)
    return const, polys, kinds, names


def _sum(F, field: FieldSpec, variables, mode, accel, budget, workers, projective, stats):
    q = field.q
    const, polys, kinds, names = _prepare(F, field, variables, mode)
    N = len(names)
    if mode == MODE_COUNT:
        if const == 0:
            return q**N
        if not polys:
            return 0
    else:
        if const == 0:
            return 0
        if not polys:
            return const * q**N
    used = sorted(set().union(*[set(f.vars) for f in polys]))
    absent = N - len(used)
    runner = _Runner(field, mode, accel, budget, workers, stats)
    homog = all(f.is_homogeneous() for f in polys)
    if projective and homog:
        degree = sum(f.total_degree() * (1 if k == 0 else 2) for f, k in zip(polys, kinds))
        # the parity of the total degree decides whether lines through 0 cancel
        odd_degree = sum(f.total_degree() for f, k in zip(polys, kinds) if k == 0) % 2
        if mode == MODE_LEGENDRE and odd_degree:
            stats.notes.append("homogeneous of odd degree: sum vanishes")
            return 0
        acc = 0
        for i in range(len(used)):
            sub = {v: 0 for v in used[:i]}
            sub[used[i]] = 1
            cp, ck = [], []
            zero_chart = False
            cconst = 1
            for f, k in zip(polys, kinds):
                g = f.substitute(sub)
                g = IntPoly(g.vars, {kk: v for kk, v in g.terms.items() if v % field.p})
                if g.is_zero():
                    zero_chart = True
                    break
                if g.is_constant():
                    if mode == MODE_LEGENDRE and k == 0:
                        cconst *= int(field.tables.chi[field.from_int(g.constant_value())])
                    continue
                cp.append(g)
                ck.append(k)
            free = used[i + 1:]
            stats.charts += 1
            if zero_chart:
                if mode == MODE_COUNT:
                    acc += q ** len(free)
                continue
            if not cp:
                acc += (q ** len(free)) * (cconst if mode == MODE_LEGENDRE else 0)
                continue
            acc += cconst * runner.run(cp, ck, free) if mode == MODE_LEGENDRE else runner.run(cp, ck, free)
        # the origin: every nonconstant homogeneous factor vanishes there
        if mode == MODE_COUNT:
            total = 1 + (q - 1) * acc
        else:
            total = (q - 1) * acc * const
        del degree
    else:
        total = runner.run(polys, kinds, used)
        if mode == MODE_LEGENDRE:
            total *= const
    return total * q**absent


def point_count(F, field: FieldSpec, variables: Sequence[str] | None = None, *,
                accel: bool = True, projective: bool = True, budget: int = DEFAULT_BUDGET,
                workers: int = 1, stats: SumStats | None = None) -> int:
    """Number of zeros of F (an IntPoly or a list of (factor, multiplicity)) in F_q^N.

    N is the number of variables (or ``len(variables)`` when given, so absent
    variables count as free coordinates).
    """
    stats = stats if stats is not None else SumStats()
    return _sum(F, field, variables, MODE_COUNT, accel, budget, workers, projective, stats)


def legendre_sum(F, field: FieldSpec, variables: Sequence[str] | None = None, *,
                 accel: str | bool = "quadratic-tail", projective: bool = True,
                 budget: int = DEFAULT_BUDGET, workers: int = 1, stats: SumStats | None = None) -> int:
    """Sum over F_q^N of the quadratic character of F (q odd)."""
    if field.q % 2 == 0:
        raise ValueError("Legendre sums need odd q")
    if isinstance(accel, str):
        if accel not in ("none", "quadratic-tail"):
            raise ValueError(f"unknown acceleration {accel!r}")
        accel = accel == "quadratic-tail"
    stats = stats if stats is not None else SumStats()
    return _sum(F, field, variables, MODE_LEGENDRE, accel, budget, workers, projective, stats)
