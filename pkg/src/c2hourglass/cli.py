"""Command-line front end.

Exit codes: 0 success, 2 user error (bad flags, unreadable or malformed
input), 3 enumeration budget exceeded, 4 internal consistency check failed.
"""

from __future__ import annotations

import argparse
import hashlib
import platform
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .c2engine import (ROUTES, TRANSFORMS, RouteInapplicable, default_start, legendre_candidate,
                       match_sequence, prefix, read_coefficient_file)
from .finitefield import DEFAULT_BUDGET, BudgetExceeded, field_for_q, legendre_sum, point_count
from .graph_core import GraphFormatError, Multigraph, parse_graph_text, to_edge_list
from .graphpoly import InternalCheckError, VertexPartition, dodgson, kirchhoff, spanning_forest
from .hourglass import KernelError, build_chain, edge_two_experiment
from .kernelcat import (TABLE1_COUNTS, TABLE2_ROWS, catalog, enumerate_kernels_report,
                        expected_prefix, load_kernel, triviality_filter)
from .polyring import poly, to_text
from .reduction import reduce, trace_text

EXIT_OK = 0
EXIT_USER = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4


class UserError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    inputs: dict = field(default_factory=dict)  # path -> sha256
    flags: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)
    wall_time: float = 0.0
    workers: int = 1

    def to_text(self) -> str:
        lines = [f"command: {self.command}"]
        for p in sorted(self.inputs):
            lines.append(f"input: {p} sha256={self.inputs[p]}")
        for k in sorted(self.flags):
            lines.append(f"flag: {k}={self.flags[k]}")
        for k in sorted(self.versions):
            lines.append(f"version: {k}={self.versions[k]}")
        lines.append(f"workers: {self.workers}")
        lines.append(f"wall_time_s: {self.wall_time:.2f}")
        return "\n".join(lines) + "\n"


def _versions() -> dict:
    import numpy
    return {"c2hourglass": __version__, "python": platform.python_version(), "numpy": numpy.__version__}


def _sha(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# argument helpers


def _read_graph(path) -> Multigraph:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UserError(f"cannot read graph file {path}: {e.strerror}") from None
    g, extra = parse_graph_text(text)
    if extra:
        raise UserError(f"{path} has a kernel externals line; use --kernel")
    return g


def _read_kernel(path):
    try:
        return load_kernel(path)
    except FileNotFoundError:
        raise UserError(f"kernel file {path} not found") from None


def _ints(text: str, what: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UserError(f"{what} must be a comma-separated list of integers") from None
    if not vals:
        raise UserError(f"{what} is empty")
    return vals


def _labels(text: str | None) -> tuple[str, ...]:
    return tuple(x for x in (text or "").split(",") if x)


def _catalog_labels(text: str | None) -> set[str]:
    """Catalog labels such as '0,4,2,5,13': commas separate labels and also sit inside them."""
    parts = [x for x in re.split(r"[\s;,]+", text or "") if x]
    out, i = set(), 0
    while i < len(parts):
        if i + 1 < len(parts) and f"{parts[i]},{parts[i + 1]}" in TABLE2_ROWS:
            out.add(f"{parts[i]},{parts[i + 1]}")
            i += 2
        else:
            if parts[i] not in TABLE2_ROWS:
                raise UserError(f"unknown kernel label {parts[i]!r}")
            out.add(parts[i])
            i += 1
    return out


def _qs(args) -> list[int]:
    if getattr(args, "primes", None):
        return _ints(args.primes, "--primes")
    if getattr(args, "q", None) is not None:
        return [args.q]
    raise UserError("give --q or --primes")


def _field(q: int):
    try:
        return field_for_q(q)
    except ValueError as e:
        raise UserError(str(e)) from None


def _target_poly(args):
    if args.poly:
        return poly(args.poly), None
    if args.graph:
        g = _read_graph(args.graph)
        return kirchhoff(g), list(g.labels)
    raise UserError("give --graph or --poly")


# ---------------------------------------------------------------------------
# commands


def cmd_poly(args, out):
    g = _read_graph(args.graph)
    out.write(to_text(kirchhoff(g)) + "\n")


def cmd_dodgson(args, out):
    g = _read_graph(args.graph)
    p = dodgson(g, I=_labels(args.I), J=_labels(args.J), K=_labels(args.K))
    out.write(to_text(p) + "\n")


def cmd_forest(args, out):
    g = _read_graph(args.graph)
    try:
        P = VertexPartition.parse(args.partition)
    except ValueError as e:
        raise UserError(str(e)) from None
    out.write(to_text(spanning_forest(g, P)) + "\n")


def cmd_reduce(args, out):
    if args.kernel:
        k = _read_kernel(args.kernel)
        for r in edge_two_experiment(k, factor=not args.no_factor):
            out.write(r.to_text())
        return
    if not args.graph:
        raise UserError("give --graph (or --kernel for the edge-2 experiment)")
    g = _read_graph(args.graph)
    start = _labels(args.start) or default_start(g)
    order = _labels(args.order) or None
    outcome = reduce(g, start, strategy=args.strategy, order=order)
    out.write(trace_text(outcome))


def cmd_count(args, out):
    F, variables = _target_poly(args)
    for q in _qs(args):
        n = point_count(F, _field(q), variables, accel=args.accel != "none", budget=args.budget,
                        workers=args.workers)
        out.write(f"{n}\t{n % q}\n")


def cmd_lsum(args, out):
    F, variables = _target_poly(args)
    for q in _qs(args):
        if q % 2 == 0:
            raise UserError("Legendre sums need odd q")
        s = legendre_sum(F, _field(q), variables, accel=args.accel, budget=args.budget, workers=args.workers)
        out.write(f"{s}\t{s % q}\n")


def _prefix(args):
    qs = _qs(args)
    for q in qs:
        _field(q)
    if args.kernel:
        if args.route != "hourglass-theorem":
            raise UserError("kernels only support --route hourglass-theorem")
        if getattr(args, "length", None) is not None and args.length < 6:
            sys.stderr.write("warning: the kernel formula is only proved for chains of length at least 6; "
                             "the chain length does not enter the computation\n")
        target = _read_kernel(args.kernel)
    elif args.graph:
        if args.route == "hourglass-theorem":
            raise UserError("--route hourglass-theorem needs --kernel")
        target = _read_graph(args.graph)
    else:
        raise UserError("give --graph or --kernel")
    return prefix(target, qs, args.route, budget=args.budget, workers=args.workers)


def cmd_c2(args, out):
    pre = _prefix(args)
    if args.csv:
        out.write(pre.to_csv())
        return
    vals = pre.residues() if args.raw else pre.negated()
    out.write(",".join(str(v) for v in vals) + "\n")


def cmd_chain(args, out):
    k = _read_kernel(args.kernel)
    ch = build_chain(k, args.length, twist=args.twist)
    out.write(to_edge_list(ch.decompleted() if args.decomplete else ch.graph))


def cmd_kernels(args, out):
    if args.action == "list":
        for e in catalog():
            variants = " ".join("{%d,%d|%d,%d}" % (*sorted(a), *sorted(b)) for a, b in e.gluing_variants)
            out.write(f"{e.label}\tinternal={e.kernel.internal_count}\tedges={len(e.kernel.graph.edges)}"
                      f"\tgluings={variants}\n")
    elif args.action == "show":
        if not args.label:
            raise UserError("kernels show needs --label")
        ent = {e.label: e for e in catalog()}
        if args.label not in ent:
            raise UserError(f"no catalog kernel {args.label!r}")
        out.write(ent[args.label].kernel.to_text())
    elif args.action == "validate":
        if not args.kernel:
            raise UserError("kernels validate needs --kernel")
        k = _read_kernel(args.kernel)
        out.write(f"valid, {triviality_filter(k)}\n")
    elif args.action == "enumerate":
        if args.n is None:
            raise UserError("kernels enumerate needs --n")
        try:
            rep = enumerate_kernels_report(args.n, allow_stretch=args.stretch, workers=args.workers)
        except ValueError as e:
            raise UserError(str(e)) from None
        out.write(rep.to_text())
        if args.export:
            d = Path(args.export)
            d.mkdir(parents=True, exist_ok=True)
            for i, k in enumerate(rep.kernels):
                (d / f"n{args.n}_{i}.kernel").write_text(k.to_text())
    elif args.action == "export":
        if not args.export:
            raise UserError("kernels export needs --export DIR")
        d = Path(args.export)
        d.mkdir(parents=True, exist_ok=True)
        for e in catalog():
            (d / e.label.replace(",", "_")).write_text(e.kernel.to_text())


def cmd_match(args, out):
    pre = _prefix(args)
    cands = []
    for d in _ints(args.legendre, "--legendre") if args.legendre else []:
        cands.append(legendre_candidate(d))
    for path in args.seq or []:
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise UserError(f"cannot read {path}: {e.strerror}") from None
        try:
            cands.append(read_coefficient_file(text, Path(path).name))
        except ValueError as e:
            raise UserError(str(e)) from None
    if not cands:
        raise UserError("give --seq FILE or --legendre D")
    out.write(match_sequence(pre, cands, args.transform).to_text())


def _reproduce_table1(args, out):
    top = args.max_internal
    if not 0 <= top <= 6 or (top == 6 and not args.stretch):
        raise UserError("--max-internal must be 0..5 (6 with --stretch)")
    out.write("internal,kernels,expected,match\n")
    ok = True
    for n in range(top + 1):
        got = len(enumerate_kernels_report(n, allow_stretch=args.stretch, workers=args.workers).kernels)
        want = TABLE1_COUNTS[n]
        ok &= got == want
        out.write(f"{n},{got},{want},{'yes' if got == want else 'NO'}\n")
    return ok


def _reproduce_table2(args, out):
    qs = _ints(args.primes, "--primes") if args.primes else [2, 3, 5, 7]
    wanted = _catalog_labels(args.labels)
    out.write("kernel,neg_c2,expected,match\n")
    ok = True
    for e in catalog():
        if wanted and e.label not in wanted:
            continue
        pre = prefix(e.kernel, qs, "hourglass-theorem", budget=args.budget, workers=args.workers)
        got = pre.negated()
        exp = expected_prefix(e.label, qs)
        if exp is None:
            verdict, exp_txt = "n/a", TABLE2_ROWS[e.label]
        else:
            known = [(g, x) for g, x in zip(got, exp) if x is not None]
            good = all(g == x for g, x in known)
            ok &= good
            verdict = "yes" if good else "NO"
            exp_txt = " ".join("?" if x is None else str(x) for x in exp)
        out.write(f"\"{e.label}\",{' '.join(map(str, got))},{exp_txt},{verdict}\n")
    return ok


def cmd_reproduce(args, out):
    t0 = time.time()
    if args.table == "table1":
        ok = _reproduce_table1(args, out)
    else:
        ok = _reproduce_table2(args, out)
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "manifest")}
    inputs = {}
    if args.table == "table2":
        inputs = {p.name: _sha(p) for p in sorted(catalog_files())}
    man = RunManifest(f"reproduce {args.table}", inputs, flags, _versions(), time.time() - t0, args.workers)
    if args.manifest:
        Path(args.manifest).write_text(man.to_text())
    else:
        sys.stderr.write(man.to_text())
    if not ok:
        raise InternalCheckError(f"{args.table} reproduction does not match the published values")


def catalog_files():
    from .kernelcat import DATA_DIR
    return [p for p in DATA_DIR.iterdir() if p.is_file() and p.name != "CHECKSUMS"]


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="c2hourglass", description="Graph polynomials, denominator reduction "
                                 "and c2 invariants of hourglass chains.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, *, field_flags=False, budget=False):
        if field_flags:
            p.add_argument("--q", type=int, help="field size (prime or prime power)")
            p.add_argument("--primes", help="comma-separated list of field sizes")
        if budget:
            p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum enumerated points")
            p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("poly", help="Kirchhoff polynomial of a graph")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("dodgson", help="Dodgson polynomial Psi^{I,J}_{G,K}")
    p.add_argument("--graph", required=True)
    p.add_argument("--I", default="")
    p.add_argument("--J", default="")
    p.add_argument("--K", default="")
    p.set_defaults(func=cmd_dodgson)

    p = sub.add_parser("forest", help="spanning forest polynomial for a vertex partition")
    p.add_argument("--graph", required=True)
    p.add_argument("--partition", required=True, help="e.g. '{0,3}{1,2}'")
    p.set_defaults(func=cmd_forest)

    p = sub.add_parser("reduce", help="denominator reduction trace")
    p.add_argument("--graph")
    p.add_argument("--kernel", help="instead: try reducing the kernel formula in the two kernel "
                   "edges at each end of edge 2")
    p.add_argument("--no-factor", action="store_true", help="experiment without factoring between steps")
    p.add_argument("--start", help="three edge labels for the 3-invariant")
    p.add_argument("--order", help="reduction order (given-order strategy)")
    p.add_argument("--strategy", choices=("given-order", "greedy-search"), default="given-order")
    p.set_defaults(func=cmd_reduce)

    for name, fn, accel in (("count", cmd_count, ("quadratic-tail", "none")),
                            ("lsum", cmd_lsum, ("quadratic-tail", "none"))):
        p = sub.add_parser(name, help="zeros of Psi_G (or --poly) over F_q" if name == "count"
                           else "Legendre sum of Psi_G (or --poly) over F_q")
        p.add_argument("--graph")
        p.add_argument("--poly", help="polynomial expression instead of a graph")
        p.add_argument("--accel", choices=accel, default="quadratic-tail")
        common(p, field_flags=True, budget=True)
        p.set_defaults(func=fn)

    for name, fn in (("c2", cmd_c2), ("match", cmd_match)):
        p = sub.add_parser(name, help="c2 prefix (negated by default)" if name == "c2"
                           else "compare a c2 prefix with candidate sequences")
        p.add_argument("--graph")
        p.add_argument("--kernel")
        p.add_argument("--route", choices=ROUTES, default="psi-count")
        common(p, field_flags=True, budget=True)
        p.add_argument("--length", type=int, help="chain length (kernel route; informational only)")
        if name == "c2":
            p.add_argument("--raw", action="store_true", help="print c2 residues instead of -c2")
            p.add_argument("--csv", action="store_true", help="CSV with raw and negated residues")
        else:
            p.add_argument("--seq", action="append", help="CSV file 'p,a_p' (repeatable)")
            p.add_argument("--legendre", help="comma-separated discriminants d for (d/p)")
            p.add_argument("--transform", choices=TRANSFORMS, default="negation")
        p.set_defaults(func=fn)

    p = sub.add_parser("chain", help="hourglass chain glued to a kernel")
    p.add_argument("--kernel", required=True)
    p.add_argument("--length", type=int, default=3)
    p.add_argument("--twist", action="store_true")
    p.add_argument("--decomplete", action="store_true", help="remove the vertex between hourglasses 2 and 3")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("kernels", help="kernel catalog and enumeration")
    p.add_argument("action", choices=("list", "show", "validate", "enumerate", "export"))
    p.add_argument("--label")
    p.add_argument("--kernel")
    p.add_argument("--n", type=int)
    p.add_argument("--stretch", action="store_true", help="allow 6 internal vertices (hours)")
    p.add_argument("--export", help="directory to write kernel files to")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_kernels)

    p = sub.add_parser("reproduce", help="regenerate the kernel count and c2 tables")
    p.add_argument("table", choices=("table1", "table2"))
    p.add_argument("--primes")
    p.add_argument("--labels", help="comma-separated catalog labels (table2)")
    p.add_argument("--max-internal", type=int, default=5)
    p.add_argument("--stretch", action="store_true")
    p.add_argument("--manifest", help="write the run manifest here instead of stderr")
    common(p, budget=True)
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USER
    try:
        args.func(args, out)
    except (UserError, GraphFormatError, KernelError, RouteInapplicable) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USER
    except BudgetExceeded as e:
        sys.stderr.write(f"budget exceeded: {e}\n")
        return EXIT_BUDGET
    except InternalCheckError as e:
        sys.stderr.write(f"internal check failed: {e}\n")
        return EXIT_INTERNAL
    except ValueError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USER
    return EXIT_OK
