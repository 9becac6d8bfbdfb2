"""Command-line entry point: ``padic-cf <subcommand> ...``.

Exit codes: 0 success, 1 assertion failure or undecided valuation, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import __version__
from .acceptance import run_acceptance
from .cf import associated_records, classify_all, largest_record
from .exact import is_prime
from .exponents import bounded_pq_search, duality_check, pq_scan
from .families import conjecture_report, fib_family_pairs, tm_family_pair, tm_zero_run_scan
from .pade import CoeffSeries, cofactor_det, gtilde, hankel_det, hankel_matrix, pade, pade_ladder
from .report import Assertion, Report, emit
from .words import check_tm_block_identities, sequence_from_name


class UsageError(Exception):
    pass


@dataclass
class SweepConfig:
    digits: str = "tm"
    primes: tuple[int, ...] = (3,)
    lo: int = 1
    hi: int = 1
    window_frac: float = 0.5
    out: str | None = None
    fmt: str = "csv"
    jobs: int = 1

    def validate(self) -> None:
        if self.lo > self.hi:
            raise UsageError(f"empty range {self.lo}..{self.hi}")
        for p in self.primes:
            if not is_prime(p):
                raise UsageError(f"{p} is not prime")
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        if not 0 < self.window_frac <= 1:
            raise UsageError("--window-frac must lie in (0, 1]")


def parse_range(text: str) -> tuple[int, int]:
    try:
        a, _, b = text.partition("..")
        lo, hi = int(a), int(b or a)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def load_config(path: str) -> dict[str, str]:
    """Flat ``key=value`` lines; ``#`` comments; keys use flag names (dashes or underscores)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{path}:{lineno}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


# --- subcommands ---------------------------------------------------------------------------

def cmd_words(args) -> Report:
    if args.action == "blocks":
        rows, asserts = [], []
        for k in range(args.n_lo, args.n_hi + 1):
            rep = check_tm_block_identities(k)
            rows.append({"k": k, "checked": rep.checked, "pass": rep.passed,
                         "counterexample": " ".join(map(str, rep.counterexample or ()))})
            asserts.append(Assertion(f"TM block identities k={k}", True, rep.passed, 0, rep.passed,
                                     "THEORY: Thue-Morse block sums"))
        return Report("words blocks", vars_of(args), ["k", "checked", "pass", "counterexample"], rows, asserts)
    seq = sequence_from_name(args.seq)
    vals = seq.prefix(args.n)
    rows = [{"index": i + seq.origin, "letter": v} for i, v in enumerate(vals)]
    return Report("words dump", vars_of(args), ["index", "letter"], rows)


def cmd_cf_table(args) -> Report:
    cfg = sweep_of(args, args.m_range)
    seq = sequence_from_name(args.digits)
    p = cfg.primes[0]
    cols = ["m", "j", "r", "conv_den", "eta", "class"]
    rows = []
    if args.classify:
        hi = cfg.hi
        for rec, _ in classify_all(seq, p, hi):
            if rec.m >= cfg.lo:
                rows.append(rec.row())
        return Report("cf-table", vars_of(args), cols, rows)
    for m in range(cfg.lo, cfg.hi + 1):
        recs = associated_records(seq, p, m)
        if args.largest:
            recs = [r for r in [largest_record(recs)] if r is not None]
        rows.extend(r.row() for r in recs)
    return Report("cf-table", vars_of(args), cols, rows)


def cmd_exponents(args) -> Report:
    cfg = sweep_of(args, (2, args.m_max))
    seq = sequence_from_name(args.digits)
    scan = pq_scan(seq, cfg.primes[0], args.m_max, window_frac=args.window_frac, jobs=cfg.jobs)
    rows = [r.row() for r in scan.rows]
    summary = scan.report.summary()
    summary["duality"] = duality_check(scan.report).to_json()
    return Report("exponents", vars_of(args), ["m", "j", "r", "conv_den", "eta", "class"], rows,
                  summary=summary)


def _series(spec: str) -> CoeffSeries:
    kind, _, arg = spec.partition(":")
    if kind == "gtilde":
        return CoeffSeries.of(gtilde(int(arg)), spec)
    if kind == "coeffs":
        return CoeffSeries([int(c) for c in arg.split(",")], spec)
    raise UsageError(f"unknown series {spec!r} (expected gtilde:K or coeffs:c0,c1,...)")


def cmd_hankel(args) -> Report:
    s = _series(args.series)
    lo, hi = args.range
    if lo < 1:
        raise UsageError("Hankel orders start at 1")
    rows, asserts = [], []
    for j in range(lo, hi + 1):
        h = hankel_det(s, j)
        rows.append({"j": j, "H": h})
        if j <= 6:
            ok = cofactor_det(hankel_matrix(s, j)) == h
            asserts.append(Assertion(f"H_{j} elimination = cofactor", "equal", ok, 0, ok, "DERIVED: oracle"))
    return Report("hankel", vars_of(args), ["j", "H"], rows, asserts)


def cmd_pade(args) -> Report:
    if args.ladder:
        K, m, p = args.K, args.m, args.p
        if not is_prime(p):
            raise UsageError(f"{p} is not prime")
        rungs = pade_ladder(K, m, p)
        cols = ["j", "m", "p_jm", "q_jm", "h_j", "c_q", "c_err", "c_q2", "ratio_to_h"]
        rows = [{c: getattr(r, c) for c in cols} for r in rungs]
        return Report("pade ladder", vars_of(args), cols, rows)
    s = _series(args.series)
    pp = pade(s, args.u, args.v)
    ok = pp.order >= args.u + args.v + 1
    row = {"u": pp.u, "v": pp.v, "A": pp.A.coeffs, "B": pp.B.coeffs, "order": pp.order,
           "leading": pp.leading, "rank": pp.rank, "rank_deficient": pp.rank_deficient}
    return Report("pade", vars_of(args), list(row), [row],
                  [Assertion("ord(Bf - A) >= u+v+1", args.u + args.v + 1, pp.order, 0, ok, "DERIVED: exact cancellation")])


def cmd_families(args) -> Report:
    cfg = sweep_of(args, args.k_range)
    p = cfg.primes[0]
    if args.which == "conjecture":
        # evidence only: every good sample of the prefixes, tagged by family
        samples = conjecture_report(p, args.m_max, args.eps, jobs=args.jobs)
        rows = [{"tag": t.tag, "a": t.a, "b": t.b, "v": t.v, "exponent": t.exponent} for t in samples]
        tags = sorted({t.tag for t in samples})
        summary = {"samples": len(samples),
                   "untagged": sum(t.tag == "untagged" for t in samples),
                   "tags": " ".join(tags)}
        return Report("families", vars_of(args), ["tag", "a", "b", "v", "exponent"], rows, summary=summary)
    cols = ["tag", "index", "a", "b", "v", "predicted_v", "mu_sample", "error"]
    rows, asserts = [], []
    pairs = []
    for k in range(cfg.lo, cfg.hi + 1):
        if args.which == "tm":
            pairs.append(tm_family_pair(k, p))
        elif args.which == "tm-gen":
            pairs.extend(z.pair for z in tm_zero_run_scan(k, args.j_max, p))
        else:
            if k < 4:
                raise UsageError("the Fibonacci family needs n >= 4")
            pairs.extend(fib_family_pairs(k, p))
    for fp in pairs:
        exact = fp.notes.get("exact", True) and fp.v != math.inf
        row = {"tag": fp.tag, "index": fp.index, "a": fp.a, "b": fp.b,
               "v": fp.v if exact else None, "predicted_v": fp.predicted_v,
               "mu_sample": fp.mu_sample if exact else None,
               "error": "" if exact else "valuation guard reached"}
        rows.append(row)
        tol = 2 if fp.tag.startswith("fib") else 0
        ok = exact and fp.predicted_v is not None and abs(fp.v - fp.predicted_v) <= tol
        asserts.append(Assertion(f"{fp.tag} index={fp.index} valuation", fp.predicted_v,
                                 fp.v if exact else "undecided", tol, ok, "THEORY: family valuation"))
    return Report("families", vars_of(args), cols, rows, asserts)


def cmd_search(args) -> Report:
    res = bounded_pq_search(args.base, args.cap, args.depth, max_nodes=args.max_nodes)
    rows = [{"depth": d, "surviving": n} for d, n in enumerate(res.per_depth) if d]
    summary = {"best_depth": res.depth, "best_prefix": " ".join(map(str, res.best_prefix)),
               "nodes": res.nodes, "exhausted": res.exhausted}
    return Report("search-bounded", vars_of(args), ["depth", "surviving"], rows, summary=summary)


def cmd_verify(args) -> Report:
    if not is_prime(args.p):
        raise UsageError(f"{args.p} is not prime")
    only = None
    if args.only:
        try:
            only = {int(x) for x in args.only.split(",")}
        except ValueError:
            raise UsageError("--only expects a comma separated list of criterion numbers") from None
    scale = 1.0 if args.suite == "paper" else 0.25
    echo = (lambda line: print(line, file=sys.stderr)) if not args.quiet else None
    results = run_acceptance(p=args.p, jobs=args.jobs, only=only, scale=scale, echo=echo)
    rows = [{"criterion": r.number, "title": r.title, "pass": r.passed, "seconds": r.seconds,
             "detail": r.detail} for r in results]
    asserts = []
    for r in results:
        for a in r.assertions:
            asserts.append(Assertion(f"[{r.number}] {a.name}", a.expected, a.observed, a.tolerance,
                                     a.passed, a.provenance))
    return Report("verify", vars_of(args), ["criterion", "title", "pass", "seconds", "detail"], rows, asserts)


# --- plumbing -----------------------------------------------------------------------------

def vars_of(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config", "subparsers")}


def sweep_of(args, rng: tuple[int, int]) -> SweepConfig:
    cfg = SweepConfig(digits=getattr(args, "digits", "tm"), primes=(getattr(args, "p", 3),),
                      lo=rng[0], hi=rng[1], window_frac=getattr(args, "window_frac", 0.5),
                      out=args.out, fmt=args.format, jobs=args.jobs)
    cfg.validate()
    return cfg


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp (byte-identical reruns)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    common.add_argument("--config", help="flat key=value file; flags given on the command line win")

    parser = argparse.ArgumentParser(prog="padic-cf", description="Continued fractions of p-adic digit prefixes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    w = sub.add_parser("words", parents=[common], help="dump a digit sequence or check block identities")
    w.add_argument("action", choices=("dump", "blocks"))
    w.add_argument("--seq", default="tm", help="tm, tm01, fib or file:PATH")
    w.add_argument("--n", type=int, default=32)
    w.add_argument("--n-lo", type=int, default=1)
    w.add_argument("--n-hi", type=int, default=8)
    w.set_defaults(func=cmd_words)

    c = sub.add_parser("cf-table", parents=[common], help="partial quotient table of x_m")
    c.add_argument("--digits", default="tm")
    c.add_argument("--p", type=int, default=3)
    c.add_argument("--m-range", type=parse_range, default=(1, 24))
    c.add_argument("--largest", action="store_true", help="only the largest quotient of each x_m")
    c.add_argument("--classify", action="store_true", help="classify quotients >= 2p by propagation")
    c.set_defaults(func=cmd_cf_table)

    e = sub.add_parser("exponents", parents=[common], help="eta curve and exponent estimates")
    e.add_argument("--digits", default="tm")
    e.add_argument("--p", type=int, default=3)
    e.add_argument("--m-max", type=int, default=256)
    e.add_argument("--window-frac", type=float, default=0.5)
    e.set_defaults(func=cmd_exponents)

    h = sub.add_parser("hankel", parents=[common], help="Hankel determinants of a series")
    h.add_argument("--series", default="gtilde:2", help="gtilde:K or coeffs:c0,c1,...")
    h.add_argument("--range", type=parse_range, default=(1, 12))
    h.set_defaults(func=cmd_hankel)

    pd = sub.add_parser("pade", parents=[common], help="Pade approximant or the lacunary ladder")
    pd.add_argument("--series", default="gtilde:2")
    pd.add_argument("--u", type=int, default=6)
    pd.add_argument("--v", type=int, default=7)
    pd.add_argument("--ladder", action="store_true")
    pd.add_argument("--K", type=int, default=2)
    pd.add_argument("--m", type=int, default=1)
    pd.add_argument("--p", type=int, default=3)
    pd.set_defaults(func=cmd_pade)

    f = sub.add_parser("families", parents=[common], help="explicit approximation families")
    f.add_argument("--which", choices=("tm", "tm-gen", "fib", "conjecture"), default="tm")
    f.add_argument("--p", type=int, default=3)
    f.add_argument("--k-range", type=parse_range, default=(1, 5))
    f.add_argument("--j-max", type=int, default=3)
    f.add_argument("--m-max", type=int, default=200, help="prefix length for --which conjecture")
    f.add_argument("--eps", type=float, default=0.05, help="report samples with |b xi - a|_p < |ab|^(-1-eps)")
    f.set_defaults(func=cmd_families)

    s = sub.add_parser("search-bounded", parents=[common], help="digits keeping all partial quotients <= cap")
    s.add_argument("--base", type=int, default=3)
    s.add_argument("--cap", type=int, default=4)
    s.add_argument("--depth", type=int, default=20)
    s.add_argument("--max-nodes", type=int, default=1_000_000)
    s.set_defaults(func=cmd_search)

    v = sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    v.add_argument("--suite", choices=("paper", "quick"), default="paper")
    v.add_argument("--p", type=int, default=3)
    v.add_argument("--only", help="comma separated criterion numbers")
    v.add_argument("--quiet", action="store_true", help="no progress lines on stderr")
    v.set_defaults(func=cmd_verify)
    parser.set_defaults(subparsers=sub.choices)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    values = load_config(args.config)
    sub = args.subparsers[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in values.items():
        action = known.get(key)
        if action is None or key in ("help", "config"):
            raise UsageError(f"unknown config key {key!r}")
        if action.nargs == 0:  # store_true
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            continue
        try:
            defaults[key] = action.type(raw) if action.type else raw
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"config key {key}: {exc}") from None
        if action.choices and defaults[key] not in action.choices:
            raise UsageError(f"config key {key}: {raw!r} not in {sorted(action.choices)}")
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = _apply_config(parser, argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 2
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        report = args.func(args)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"padic-cf: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, IndexError, OSError) as exc:
        print(f"padic-cf: error: {exc}", file=sys.stderr)
        return 2
    if not args.no_timestamp:
        report.stamp()
    data = emit(report, args.format)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return 0 if report.passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
