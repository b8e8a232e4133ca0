"""Command-line surface: group info, B0 runs, theorem verification,
isoclinism tests, catalog listing, ingestion, and report emission.

Exit codes: 0 success, 1 cap exceeded, 2 invalid input, 3 verification or
method-agreement mismatch.  Flags can be overridden through B0LAB_* env
variables (B0LAB_ORACLE_CAP, B0LAB_CLASS_CAP, B0LAB_PAIRS, B0LAB_JOBS,
B0LAB_CACHE, B0LAB_FORMAT).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, dataclass

from . import __version__
from . import pcgroup as pc
from .catalog import (
    CatalogGroup,
    canonical_text,
    catalog_group,
    catalog_groups,
    family_counts,
    parse_pcp,
    phi10_count,
)
from .cohomology import OracleCapExceeded, b0_oracle, lemma22_check, thm56_certificate
from .isoclinism import family_fingerprint, is_isoclinic
from .multiplier import B0Report, ClassCapExceeded, PairCapExceeded, b0_tensor, verify_theorem

EXIT_OK = 0
EXIT_CAP = 1
EXIT_INVALID = 2
EXIT_MISMATCH = 3


@dataclass
class RunConfig:
    p: int = 3
    method: str = "tensor"  # tensor | oracle | criteria | all
    oracle_cap: int | None = None
    pair_cap: int | None = None
    class_cap: int | None = None
    search_budget: int = 2_000_000
    cache: str | None = None
    fmt: str = "text"  # text | json | csv
    pairs: str = "full"  # full | bicyclic
    jobs: int = 1

    @staticmethod
    def from_args(args):
        env = os.environ.get
        return RunConfig(
            p=getattr(args, "p", 3) or 3,
            method=getattr(args, "method", None) or env("B0LAB_METHOD", "tensor"),
            oracle_cap=getattr(args, "oracle_cap", None)
            or (int(env("B0LAB_ORACLE_CAP")) if env("B0LAB_ORACLE_CAP") else None),
            class_cap=getattr(args, "class_cap", None)
            or (int(env("B0LAB_CLASS_CAP")) if env("B0LAB_CLASS_CAP") else None),
            pair_cap=getattr(args, "pair_cap", None)
            or (int(env("B0LAB_PAIR_CAP")) if env("B0LAB_PAIR_CAP") else None),
            cache=getattr(args, "cache", None) or env("B0LAB_CACHE"),
            fmt=getattr(args, "format", None) or env("B0LAB_FORMAT", "text"),
            pairs=getattr(args, "pairs", None) or env("B0LAB_PAIRS", "full"),
            jobs=getattr(args, "jobs", None) or int(env("B0LAB_JOBS", "1")),
        )


def presentation_hash(P) -> str:
    return hashlib.sha256(canonical_text(P).encode()).hexdigest()


@dataclass
class ResultRecord:
    hash: str
    name: str
    p: int
    n: int
    method: str
    b0_invariants: list
    m_order: int
    m0_order: int
    elapsed_ms: int
    version: str = __version__

    @staticmethod
    def from_report(P, rep: B0Report):
        return ResultRecord(
            hash=presentation_hash(P),
            name=rep.name,
            p=rep.p,
            n=rep.order_exponent,
            method=rep.method,
            b0_invariants=list(rep.invariants),
            m_order=rep.m_order,
            m0_order=rep.m0_order,
            elapsed_ms=int(rep.elapsed * 1000),
        )

    def stable_key(self):
        """Identity of the result, timing excluded."""
        d = asdict(self)
        d.pop("elapsed_ms")
        return json.dumps(d, sort_keys=True)


def cache_append(path, record: ResultRecord):
    with open(path, "a") as fh:
        fh.write(json.dumps(asdict(record), sort_keys=True) + "\n")


def cache_read(path):
    out = []
    if not os.path.exists(path):
        return out
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(ResultRecord(**json.loads(line)))
            except (json.JSONDecodeError, TypeError):
                print(f"warning: skipping corrupt cache line {lineno}", file=sys.stderr)
    return out


def load_group_spec(spec, p=None):
    """A group from `phiF:VARIANT` catalog syntax or a pcp file path.

    Returns (catalog entry or None, presentation)."""
    if os.path.exists(spec):
        with open(spec) as fh:
            P = parse_pcp(fh.read())
        return None, P
    if spec.lower().startswith("phi"):
        head, _, variant = spec.partition(":")
        if not variant:
            raise ValueError("catalog spec must look like phi10:28 or phi6:(221)a")
        family = int(head[3:])
        cg = catalog_group(p or 3, family, variant)
        return cg, cg.group
    raise ValueError(f"cannot interpret group spec {spec!r} (not a file, not phiF:VARIANT)")


def load_corpus_dir(path, p):
    """All .pcp files under a directory, as presentations."""
    groups = []
    for fname in sorted(os.listdir(path)):
        if not fname.endswith(".pcp"):
            continue
        with open(os.path.join(path, fname)) as fh:
            P = parse_pcp(fh.read())
        if P.p != p:
            continue
        if P.name is None:
            P.name = fname[:-4]
        groups.append(P)
    return groups


def emit(data, fmt, stream=None):
    stream = stream or sys.stdout
    if fmt == "json":
        json.dump(data, stream, indent=2, sort_keys=True, default=str)
        stream.write("\n")
    elif fmt == "csv":
        if isinstance(data, dict):
            data = [data]
        if not data:
            return
        cols = ["name", "p", "n", "method", "b0_invariants", "m_order", "m0_order", "elapsed_ms"]
        w = csv.DictWriter(stream, fieldnames=cols, extrasaction="ignore")
        w.writeheader()
        for row in data:
            row = dict(row)
            if isinstance(row.get("b0_invariants"), list):
                row["b0_invariants"] = "x".join(map(str, row["b0_invariants"])) or "0"
            w.writerow(row)
    else:
        if isinstance(data, dict):
            for key in sorted(data):
                stream.write(f"{key}: {data[key]}\n")
        else:
            for row in data:
                stream.write(" ".join(f"{k}={v}" for k, v in row.items()) + "\n")


def cmd_group_info(args):
    cfg = RunConfig.from_args(args)
    try:
        _, P = load_group_spec(args.spec, p=args.p)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    Z = pc.center(P)
    D = pc.derived_subgroup(P)
    info = {
        "name": P.name or args.spec,
        "p": P.p,
        "order": P.order,
        "center_order": Z.order,
        "derived_order": D.order,
        "exponent": pc.group_exponent(P),
        "abelianization": pc.abelianization_invariants(P),
        "fingerprint": list(map(str, family_fingerprint(P))),
        "hash": presentation_hash(P),
    }
    emit(info, cfg.fmt)
    return EXIT_OK


def _run_method(P, method, cfg, name=None):
    if method == "tensor":
        return b0_tensor(P, pairs=cfg.pairs, class_cap=cfg.class_cap, pair_cap=cfg.pair_cap, name=name)
    if method == "oracle":
        return b0_oracle(P, size_cap=cfg.oracle_cap, name=name)
    if method == "criteria":
        return _run_criteria(P, name=name)
    raise ValueError(f"unknown method {method!r}")


def _run_criteria(P, name=None):
    """Certificate-only verdict: transgression criterion for nonzero, the
    7-term certificate over index-p subgroups for zero; may be inconclusive."""
    t0 = time.time()
    cert = {}
    if P.n == 5 and P.p >= 3:
        try:
            ok, c = lemma22_check(P)
            cert["lemma22"] = c.get("verdict", "hypotheses fail")
            if ok:
                return B0Report(
                    name or P.name or "<unnamed>", P.p, P.n, "criterion", ["nonzero"], 0, 0,
                    certificates=cert, elapsed=time.time() - t0,
                )
        except (ValueError, OracleCapExceeded) as exc:
            cert["lemma22"] = f"not applicable: {exc}"
    for drop in range(P.n):
        gens = [P.generator(i) for i in range(P.n) if i != drop]
        N = pc.subgroup_closure(P, gens)
        if N.order != P.order // P.p or not N.is_normal() or N.order > P.p**4:
            continue
        try:
            ok, c = thm56_certificate(P, N)
        except ValueError:
            continue
        if ok:
            cert["thm56"] = c["verdict"]
            return B0Report(
                name or P.name or "<unnamed>", P.p, P.n, "criterion", [], 0, 0,
                certificates=cert, elapsed=time.time() - t0,
            )
    cert["verdict"] = "inconclusive"
    return B0Report(
        name or P.name or "<unnamed>", P.p, P.n, "criterion", ["inconclusive"], 0, 0,
        certificates=cert, elapsed=time.time() - t0, status="inconclusive",
    )


def cmd_b0(args):
    cfg = RunConfig.from_args(args)
    try:
        _, P = load_group_spec(args.spec, p=args.p)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    all_mode = cfg.method == "all"
    methods = ["tensor", "oracle", "criteria"] if all_mode else [cfg.method]
    reports = []
    for method in methods:
        try:
            reports.append(_run_method(P, method, cfg))
        except OracleCapExceeded as exc:
            if all_mode:
                print(f"note: oracle out of scope ({exc})", file=sys.stderr)
                continue
            print(f"error: cap exceeded ({exc})", file=sys.stderr)
            return EXIT_CAP
        except (ClassCapExceeded, PairCapExceeded) as exc:
            print(f"error: cap exceeded ({exc})", file=sys.stderr)
            return EXIT_CAP
    if all_mode:
        # agreement on zero/nonzero for every conclusive in-scope method,
        # and on exact invariants between tensor and oracle
        verdicts = {r.method: r.nonzero for r in reports if r.status == "ok"}
        exact = {tuple(r.invariants) for r in reports if r.method in ("tensor", "oracle")}
        if len(set(verdicts.values())) > 1 or len(exact) > 1:
            print("error: methods disagree:", file=sys.stderr)
            for r in reports:
                print(f"  {r.method}: {r.invariants} ({r.status})", file=sys.stderr)
            return EXIT_MISMATCH
    rows = []
    for rep in reports:
        rec = ResultRecord.from_report(P, rep)
        if cfg.cache:
            cache_append(cfg.cache, rec)
        rows.append(asdict(rec))
    emit(rows if len(rows) > 1 else rows[0], cfg.fmt)
    return EXIT_OK


def cmd_verify(args):
    cfg = RunConfig.from_args(args)
    p = args.p
    if p is None or p == 2 or p not in (3, 5, 7):
        print("error: verify supports odd primes p in {3, 5, 7}", file=sys.stderr)
        return EXIT_INVALID
    corpus = None
    if args.corpus:
        try:
            corpus = load_corpus_dir(args.corpus, p) if os.path.isdir(args.corpus) else None
            if corpus is None:
                with open(args.corpus) as fh:
                    corpus = [parse_pcp(fh.read())]
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
    def progress(row):
        r = row.report
        inv = "x".join(map(str, r.invariants)) or "0"
        print(f"  {r.name:28s} family={row.family} B0={inv:8s} ({r.elapsed:.1f}s)", file=sys.stderr)

    if cfg.jobs > 1:
        res = _verify_parallel(p, corpus, cfg, progress if args.verbose else None)
    else:
        res = verify_theorem(p, corpus=corpus, pairs=cfg.pairs, progress=progress if args.verbose else None)
    emit(res.summary(), cfg.fmt)
    if cfg.cache:
        by_name = {}
        for cg in corpus or catalog_groups(p):
            G = getattr(cg, "group", cg)
            by_name[G.name or ""] = G
        for row in res.rows:
            G = by_name.get(row.name)
            if G is not None:
                cache_append(cfg.cache, ResultRecord.from_report(G, row.report))
    if not res.ok:
        print("verification mismatch:", res.offenders, file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def _verify_one(task):
    """Worker for parallel verify: (text, name, pairs) -> report fields."""
    text, name, pairs = task
    P = parse_pcp(text)
    P.name = name
    rep = b0_tensor(P, pairs=pairs)
    return rep


def _verify_parallel(p, corpus, cfg, progress):
    import concurrent.futures

    from .isoclinism import is_isoclinic
    from .catalog import build_phi10, phi10_variants
    from .multiplier import VerificationResult, VerificationRow

    entries = list(corpus) if corpus is not None else catalog_groups(p)
    tasks = []
    meta = []
    phi10_rep = build_phi10(p, phi10_variants(p)[0])
    for entry in entries:
        G = getattr(entry, "group", entry)
        family = entry.fid.family if hasattr(entry, "fid") else None
        if family is None:
            family = 10 if is_isoclinic(G, phi10_rep)[0] else 0
        gap_id = getattr(entry, "gap_id", None)
        tasks.append((canonical_text(G), G.name or "<unnamed>", cfg.pairs))
        meta.append((family, gap_id))
    rows = []
    offenders = []
    with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        for (family, gap_id), rep in zip(meta, pool.map(_verify_one, tasks)):
            row = VerificationRow(rep.name, family, gap_id, rep)
            rows.append(row)
            if rep.nonzero != (family == 10):
                offenders.append((rep.name, f"B0 {'nonzero' if rep.nonzero else 'zero'} but family {family}"))
            if progress:
                progress(row)
    return VerificationResult(p=p, rows=rows, ok=not offenders, offenders=offenders)


def cmd_isoclinism(args):
    cfg = RunConfig.from_args(args)
    try:
        _, A = load_group_spec(args.spec_a, p=args.p)
        _, B = load_group_spec(args.spec_b, p=args.p)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    ok, witness = is_isoclinic(A, B)
    data = {"isoclinic": ok}
    if ok:
        data["theta_images"] = [list(x.exps) for x in witness.theta_images]
    emit(data, cfg.fmt)
    return EXIT_OK


def cmd_catalog_list(args):
    cfg = RunConfig.from_args(args)
    p = args.p or 3
    try:
        groups = catalog_groups(p)
        counts = family_counts(p)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    rows = []
    for cg in groups:
        rows.append(
            {
                "family": cg.fid.family,
                "variant": cg.fid.variant,
                "name": cg.name,
                "gap_id": cg.gap_id if cg.gap_id is not None else "",
            }
        )
    emit(rows, cfg.fmt)
    built = {}
    for cg in groups:
        built[cg.fid.family] = built.get(cg.fid.family, 0) + 1
    summary = {
        "p": p,
        "built_in": len(groups),
        "phi10_count": phi10_count(p),
        "family_counts": counts,
        "built_per_family": built,
    }
    emit(summary, cfg.fmt)
    return EXIT_OK


def cmd_ingest(args):
    cfg = RunConfig.from_args(args)
    try:
        with open(args.path) as fh:
            P = parse_pcp(fh.read())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    emit(
        {
            "name": P.name or os.path.basename(args.path),
            "p": P.p,
            "order": P.order,
            "consistent": True,
            "hash": presentation_hash(P),
        },
        cfg.fmt,
    )
    return EXIT_OK


def cmd_report(args):
    cfg = RunConfig.from_args(args)
    path = args.cache or cfg.cache
    if not path:
        print("error: no cache path given", file=sys.stderr)
        return EXIT_INVALID
    records = cache_read(path)
    records.sort(key=lambda r: (r.name, r.p, r.method, r.hash))
    emit([asdict(r) for r in records], cfg.fmt)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="b0lab", description="Bogomolov multipliers of finite p-groups")
    ap.add_argument("--version", action="version", version=f"b0lab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, with_method=True):
        sp.add_argument("--p", type=int, default=None, help="prime for catalog specs")
        if with_method:
            sp.add_argument("--method", choices=["tensor", "oracle", "criteria", "all"], default=None)
        sp.add_argument("--oracle-cap", dest="oracle_cap", type=int, default=None)
        sp.add_argument("--class-cap", dest="class_cap", type=int, default=None)
        sp.add_argument("--pair-cap", dest="pair_cap", type=int, default=None)
        sp.add_argument("--pairs", choices=["full", "bicyclic"], default=None)
        sp.add_argument("--jobs", type=int, default=None)
        sp.add_argument("--cache", default=None)
        sp.add_argument("--format", choices=["text", "json", "csv"], default=None)

    g = sub.add_parser("group", help="group-level queries")
    gsub = g.add_subparsers(dest="subcommand", required=True)
    gi = gsub.add_parser("info", help="order, center, derived, exponent, abelianization, fingerprint")
    gi.add_argument("spec")
    common(gi, with_method=False)
    gi.set_defaults(func=cmd_group_info)

    b = sub.add_parser("b0", help="compute B0(G)")
    b.add_argument("spec")
    common(b)
    b.set_defaults(func=cmd_b0)

    v = sub.add_parser("verify", help="B0 != 0 exactly on Phi_10 (the main theorem)")
    common(v)
    v.add_argument("--corpus", default=None, help="directory of .pcp files or a single file")
    v.add_argument("--verbose", action="store_true")
    v.set_defaults(func=cmd_verify)

    iso = sub.add_parser("isoclinism", help="test two groups for isoclinism")
    iso.add_argument("spec_a")
    iso.add_argument("spec_b")
    common(iso, with_method=False)
    iso.set_defaults(func=cmd_isoclinism)

    c = sub.add_parser("catalog", help="catalog queries")
    csub = c.add_subparsers(dest="subcommand", required=True)
    cl = csub.add_parser("list", help="list built-in groups and family counts")
    common(cl, with_method=False)
    cl.set_defaults(func=cmd_catalog_list)

    ing = sub.add_parser("ingest", help="parse and validate a pcp file")
    ing.add_argument("path")
    common(ing, with_method=False)
    ing.set_defaults(func=cmd_ingest)

    rep = sub.add_parser("report", help="emit cached results")
    common(rep, with_method=False)
    rep.set_defaults(func=cmd_report)

    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except BrokenPipeError:
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()
