"""Command line: run protocols, search for codes, verify code files.

Exit codes: 0 pass, 1 property violation, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import os
import sys
from collections import Counter
from fractions import Fraction

import numpy as np

from . import io as cio
from .bits import EQ, HD, HD44, BitString, GapHD, HDKK, popcount, truth
from .engine import evaluate_batch, run_protocol, wilson_interval
from .fcodes import PartialF, make_code, search_fcodes, verify_fcode

DEFAULT_SEED = 20240607

PROTOCOLS = ("equality", "count", "hd_k", "hd44", "gap-hd", "hd22", "hd44-conditional",
             "protocol4", "gap-embedding", "pad")
RANDOMIZED = PROTOCOLS[:5]


class UsageError(ValueError):
    pass


# run -------------------------------------------------------------------------

def _mc_cases(cfg):
    """(protocol, case function i -> (descriptor, x, y, truth)) for a randomized run."""
    from . import experiments as ex
    from .protocols import MORE_THAN_R, count_unequal_blocks, equality_protocol, hd44_protocol, hd_k_protocol
    from .reductions import gap_hd_protocol

    kind, seed = cfg["protocol"], cfg["seed"]
    delta = Fraction(cfg["delta"])
    n = cfg["n"]
    rng = np.random.default_rng(seed)
    if kind == "equality":
        p = equality_protocol(cfg["b"])

        def case(i):
            x = ex.random_bits(n, rng)
            y = x if i % 2 == 0 else ex.flip_random(x, int(rng.integers(1, n + 1)), rng)
            return ("equal" if i % 2 == 0 else "unequal"), x, y, truth(EQ(), x, y)
    elif kind == "count":
        r = cfg["r"]
        p = count_unequal_blocks(r, delta)

        def case(i):
            d = i % (r + 2)
            x, y = ex.blocked_delta_case(n, 8, d, rng)
            return f"delta={d}", x, y, d if d <= r else MORE_THAN_R
    elif kind == "hd_k":
        k = cfg["k"]
        p = hd_k_protocol(k, delta, n)

        def case(i):
            d = i % (min(2 * k, n) + 1)
            x, y = ex.distance_class_case(n, d, rng)
            return f"dist={d}", x, y, int(d == k)
    elif kind == "hd44":
        p = hd44_protocol(delta)
        sigs = [(4, 4), (2, 6), (1, 7), (3, 5), (4,), (4, 4, 4)]

        def case(i):
            sig = sigs[i % len(sigs)]
            x, y = ex.signature_case(sig, n, 8, rng)
            return "sig=" + "/".join(map(str, sig)), x, y, truth(HD44, x, y)
    elif kind == "gap-hd":
        gamma = Fraction(cfg["gamma"])
        p = gap_hd_protocol(gamma, delta)
        dists = [0, int(gamma * n), n - int(gamma * n), n]

        def case(i):
            d = dists[i % len(dists)]
            x, y = ex.distance_class_case(n, d, rng)
            return f"dist={d}", x, y, truth(GapHD(gamma), x, y)
    else:
        raise UsageError(f"protocol {kind!r} is not randomized")
    return p, case


def run_randomized(cfg):
    p, case = _mc_cases(cfg)
    rows, errors, bits = [], 0, []
    for i in range(cfg["trials"]):
        desc, x, y, want = case(i)
        out, cost = run_protocol(p, x, y, cfg["seed"] ^ i)
        err = int(out != want)
        errors += err
        bits.append(cost.bits_sent)
        rows.append((i, desc, want, out, err, cost.bits_sent, cost.total_queries, cfg["seed"] ^ i))
    lo, hi = wilson_interval(errors, cfg["trials"])
    summary = {
        "cases": cfg["trials"], "errors": errors, "error_rate": errors / cfg["trials"],
        "wilson_low": lo, "wilson_high": hi,
        "bits_min": min(bits), "bits_max": max(bits), "bits_mean": sum(bits) / len(bits),
    }
    bound = 2.0 ** -cfg["b"] if cfg["protocol"] == "equality" else float(Fraction(cfg["delta"]))
    summary["error_bound"] = bound
    ok = lo <= bound
    header = ("trial", "case", "truth", "output", "error", "bits_sent", "oracle_queries", "seed")
    return summary, header, rows, ok


def _oracle_classes(cfg):
    """Yield (class descriptor, truth array, labels array, query counts) batches."""
    from . import experiments as ex
    from .protocols import hd22_oracle_tree, hd44_conditional_tree

    kind, n = cfg["protocol"], cfg["n"]
    if kind == "hd22":
        tree = hd22_oracle_tree(n)
        for X, Y in ex.two_row_batches(n, n, fill="zero"):
            labels, counts = evaluate_batch(tree, X, Y)
            D = popcount(X ^ Y).astype(np.int64)
            sigs = ex.signature_of_arrays(X, Y)
            want = ((D == 2).sum(axis=1) == 2).astype(np.int64)
            yield ["sig=" + "/".join(map(str, s)) for s in sigs], want, labels, counts
    elif kind == "hd44-conditional":
        code = make_code("product_slice", n)
        tree = hd44_conditional_tree(code, n)
        for X, Y, ds in ex.two_row_slice_batches(n, 2 * n, 8):
            labels, counts = evaluate_batch(tree, X, Y)
            desc = "sig=" + "/".join(map(str, sorted(ds)))
            yield [desc] * len(X), np.full(len(X), int(ds == (4, 4))), labels, counts
    else:
        raise UsageError(f"protocol {kind!r} is not an oracle tree")


def run_exhaustive(cfg):
    kind = cfg["protocol"]
    agg = {}

    def add(desc, want, out, queries):
        key = (desc, str(want), str(out))
        entry = agg.setdefault(key, [0, Counter()])
        entry[0] += 1
        entry[1][queries] += 1

    if kind in ("hd22", "hd44-conditional"):
        for descs, want, labels, counts in _oracle_classes(cfg):
            # group identical rows without a Python loop over every case
            keys = Counter(zip(descs, want.tolist(), [str(v) for v in labels], counts.tolist()))
            for (desc, w, out, q), c in keys.items():
                entry = agg.setdefault((desc, str(w), out), [0, Counter()])
                entry[0] += c
                entry[1][q] += c
    elif kind == "protocol4":
        from .composition import make_g
        from .reductions import composed_truth, neighbourhood, partition_tandem, protocol4_tree

        r, N, q = cfg["r"], 8, 2
        bases = [partition_tandem(N, q, seed=cfg["seed"] + i) for i in range(cfg["n"])]
        g = make_g("multiset")
        p4 = protocol4_tree(bases, r, g)
        anchors = [tuple(i % N for i in range(cfg["n"])), (N - 1,) * cfg["n"]]
        cases = [(x, y) for x in anchors for y in neighbourhood(x, N, r + 1)]
        labels, counts = evaluate_batch(p4.tree, np.array([c[0] for c in cases]), np.array([c[1] for c in cases]))
        for (x, y), out, qc in zip(cases, labels, counts.tolist()):
            d = sum(a != b for a, b in zip(x, y))
            add(f"delta={d}", composed_truth(bases, r, g, x, y), out, qc)
    elif kind == "gap-embedding":
        from .reductions import embed_into_gaphd, equality_one_way

        emb = embed_into_gaphd(equality_one_way(cfg["c"]), cfg["n"], seed=cfg["seed"])
        tree = emb.oracle_tree()
        from .engine import run_oracle_protocol

        for xv in range(1 << cfg["n"]):
            for yv in range(1 << cfg["n"]):
                x, y = BitString(cfg["n"], xv), BitString(cfg["n"], yv)
                out, qc = run_oracle_protocol(tree, x, y, strict=True)
                add("equal" if x == y else "unequal", int(x == y), out, qc)
    elif kind == "pad":
        from .reductions import pad_hdk_to_hdkk

        n, k = cfg["n"], cfg["k"]
        for xv in range(1 << n):
            for yv in range(1 << n):
                x, y = BitString(n, xv), BitString(n, yv)
                if x == y:
                    continue
                out = truth(HDKK(k), pad_hdk_to_hdkk(x, n), pad_hdk_to_hdkk(y, n))
                add(f"dist={(xv ^ yv).bit_count()}", truth(HD(k), x, y), out, 0)
    else:
        raise UsageError(f"protocol {kind!r} has no exhaustive mode")

    rows, errors, cases, qmin, qmax = [], 0, 0, None, None
    for (desc, want, out), (count, qs) in sorted(agg.items()):
        err = int(want != out)
        errors += err * count
        cases += count
        qmin = min(qs) if qmin is None else min(qmin, min(qs))
        qmax = max(qs) if qmax is None else max(qmax, max(qs))
        rows.append((desc, want, out, err, count, " ".join(f"{q}x{c}" for q, c in sorted(qs.items()))))
    summary = {"cases": cases, "errors": errors, "error_rate": errors / max(cases, 1),
               "queries_min": qmin, "queries_max": qmax}
    if kind == "gap-embedding":
        summary.update({f"embedding_{k}": v for k, v in emb.report.items()})
    header = ("case", "truth", "output", "error", "count", "queries")
    return summary, header, rows, errors == 0


DEFAULTS = {"n": None, "k": 2, "r": 2, "delta": "1/8", "b": 2, "c": 2, "gamma": "1/4",
            "trials": 1000, "seed": DEFAULT_SEED, "exhaustive": False, "out": None}
DEFAULT_N = {"equality": 16, "count": 8, "hd_k": 64, "hd44": 4, "gap-hd": 64, "hd22": 4,
             "hd44-conditional": 4, "protocol4": 6, "gap-embedding": 4, "pad": 6}


def build_config(args):
    cfg = dict(DEFAULTS)
    if args.config:
        loaded = cio.load_config(args.config)
        unknown = set(loaded) - set(DEFAULTS) - {"protocol", "command"}
        if unknown:
            raise UsageError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        cfg.update(loaded)
    for key in list(DEFAULTS) + ["protocol"]:
        v = getattr(args, key, None)
        if v is not None and v is not False:
            cfg[key] = v
    cfg["command"] = "run"
    if cfg.get("protocol") not in PROTOCOLS:
        raise UsageError(f"field 'protocol' must be one of {', '.join(PROTOCOLS)}")
    if cfg["n"] is None:
        cfg["n"] = DEFAULT_N[cfg["protocol"]]
    for key in ("n", "k", "r", "b", "c", "trials", "seed"):
        if not isinstance(cfg[key], int) or cfg[key] < 0:
            raise UsageError(f"field '{key}' must be a nonnegative integer")
    try:
        d = Fraction(str(cfg["delta"]))
    except ValueError:
        raise UsageError("field 'delta' must be a rational number") from None
    if not 0 < d < 1:
        raise UsageError("field 'delta' must lie in (0, 1)")
    cfg["delta"] = str(d)
    if cfg["trials"] < 1:
        raise UsageError("field 'trials' must be >= 1")
    if cfg["protocol"] not in RANDOMIZED:
        cfg["exhaustive"] = True
    return cfg


def cmd_run(args, out=None):
    out = out or sys.stdout
    cfg = build_config(args)
    if cfg["exhaustive"]:
        summary, header, rows, ok = run_exhaustive(cfg)
    else:
        summary, header, rows, ok = run_randomized(cfg)
    echo = {k: v for k, v in cfg.items() if k != "out"}
    text = cio.format_report(echo, summary, header, rows)
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    for key, value in summary.items():
        print(f"{key}: {cio._cell(value)}", file=out)
    return 0 if ok else 1


# search-codes / verify ----------------------------------------------------------

def cmd_search_codes(args, out=None):
    out = out or sys.stdout
    try:
        f = PartialF.parse(args.f)
    except ValueError as exc:
        raise UsageError(f"field 'f': {exc}") from None
    res = search_fcodes(args.n, args.m, f, args.domain, budget=args.budget, k=args.k,
                        max_solutions=args.max_solutions)
    bad = [c for c in res.codes if verify_fcode(c, f, limit=1)]
    status = "exhausted" if res.exhausted else "partial"
    print(f"{status}, {len(res.codes) if res.codes else 'none'}", file=out)
    print(f"nodes: {res.nodes}", file=out)
    print(f"reason: {res.reason}", file=out)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for i, code in enumerate(res.codes):
            cio.write_code(code, os.path.join(args.out, f"code_{i:04d}.txt"))
        with open(os.path.join(args.out, "search.log"), "w") as fh:
            fh.write(f"n={args.n} m={args.m} f={f} domain={args.domain} budget={args.budget}\n")
            fh.write(f"status={status} found={len(res.codes)} nodes={res.nodes} reason={res.reason}\n")
    return 1 if bad else 0


def cmd_verify(args, out=None):
    out = out or sys.stdout
    code = cio.read_code(args.code)
    if args.f_file:
        f = cio.read_partial_f(args.f_file)
    elif args.f:
        f = PartialF.parse(args.f)
    else:
        raise UsageError("give a partial function with --f or a file argument")
    bad = verify_fcode(code, f)
    if not bad:
        print(f"pass: {len(code.domain)} strings, f = {f}", file=out)
        return 0
    print(f"fail: {len(bad)} violation(s)", file=out)
    for x, y, d, want, got in bad:
        print(f"{x} {y} dist={d} expected={want} got={got}", file=out)
    return 1


def build_parser():
    ap = argparse.ArgumentParser(prog="cclab", description="Two-party communication protocol lab.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a protocol by Monte-Carlo sweep or exhaustively")
    run.add_argument("--protocol", choices=PROTOCOLS)
    run.add_argument("--n", type=int)
    run.add_argument("--k", type=int)
    run.add_argument("--r", type=int)
    run.add_argument("--delta")
    run.add_argument("--b", type=int, help="hash bits for equality")
    run.add_argument("--c", type=int, help="message bits for the one-way protocol")
    run.add_argument("--gamma")
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--exhaustive", action="store_true")
    run.add_argument("--out")
    run.add_argument("--config")
    run.set_defaults(func=cmd_run)

    sc = sub.add_parser("search-codes", help="exhaustive search for small f-codes")
    sc.add_argument("--n", type=int, required=True)
    sc.add_argument("--m", type=int, required=True)
    sc.add_argument("--f", required=True, help="partial function as d:value,...")
    sc.add_argument("--domain", default="cube", choices=("cube", "slice", "weight-k"))
    sc.add_argument("--k", type=int)
    sc.add_argument("--budget", type=int, default=1_000_000)
    sc.add_argument("--max-solutions", type=int, default=100)
    sc.add_argument("--out")
    sc.set_defaults(func=cmd_search_codes)

    ver = sub.add_parser("verify", help="verify a code file against a partial function")
    ver.add_argument("code")
    ver.add_argument("f_file", nargs="?")
    ver.add_argument("--f")
    ver.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        return args.func(args)
    except (UsageError, cio.ParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
