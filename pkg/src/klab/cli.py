"""Command-line front end: decisions, norms, covers, experiments, reports.

Exit codes: 0 success / check passed, 1 failed check, 2 invalid input.
Every JSON output embeds the resolved run configuration (cover constants,
quadrature order, thread cap) under schema "klab-report/1".
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

SCHEMA = "klab-report/1"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2


def _thread_cap():
    raw = os.environ.get("KLAB_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return None
    if n > 0:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(n))
        return n
    return None


def _run_config(args, extra=None):
    from . import geometry, norms
    cfg = {"command": args.command,
           "coverConstants": {"c1": geometry.C1,
                              "c2Factor": geometry.C2_FACTOR,
                              "c0Level0": geometry.C0_LEVEL0},
           "quadratureNodesPerDim": getattr(args, "nodes",
                                            norms.DEFAULT_NODES),
           "threads": _thread_cap()}
    for key in ("m", "a", "p", "tau", "d", "delta", "ell", "beta", "lam",
                "R", "j_max", "J", "out"):
        if hasattr(args, key) and getattr(args, key) is not None:
            cfg[key] = getattr(args, key) if key != "out" \
                else str(getattr(args, key))
    if extra:
        cfg.update(extra)
    return cfg


def _emit(args, name, config, stats, passed, csv_rows=None):
    doc = {"schema": SCHEMA, "experiment": name, "params": config,
           "pass": bool(passed), "statistics": stats}
    print(json.dumps(doc, indent=2, default=str))
    out = getattr(args, "out", None)
    if out:
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / f"{name}.json").write_text(
            json.dumps(doc, indent=2, default=str))
        if csv_rows is not None:
            with open(outdir / f"{name}.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                for row in csv_rows:
                    w.writerow([repr(v) if isinstance(v, float) else v
                                for v in row])
    return EXIT_OK if passed else EXIT_FAILED


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_decide(args):
    from .embeddings import decide_embedding, HOLDS, FAILS
    v = decide_embedding(args.m, args.a, args.p, args.tau, args.d,
                         args.delta)
    print(v.outcome)
    print(json.dumps({"schema": SCHEMA, "params": _run_config(args),
                      "verdict": v.to_json()}, indent=2))
    return {HOLDS: EXIT_OK, FAILS: EXIT_FAILED}.get(v.outcome, EXIT_INVALID)


def _cmd_decide_reverse(args):
    from .embeddings import decide_reverse_embedding, HOLDS, FAILS
    v = decide_reverse_embedding(args.m, args.a, args.p, args.tau, args.d,
                                 args.delta)
    print(v.outcome)
    print(json.dumps({"schema": SCHEMA, "params": _run_config(args),
                      "verdict": v.to_json()}, indent=2))
    return {HOLDS: EXIT_OK, FAILS: EXIT_FAILED}.get(v.outcome, EXIT_INVALID)


def _cmd_decide_holder(args):
    from .embeddings import decide_embedding_holder_route, HOLDS, FAILS
    v, route = decide_embedding_holder_route(args.m, args.a, args.p,
                                             args.tau, args.d, args.ell)
    print(v.outcome)
    print(json.dumps({"schema": SCHEMA, "params": _run_config(args),
                      "verdict": v.to_json(),
                      "route": {"applies": route.applies, "eta": route.eta,
                                "r": route.r}}, indent=2))
    return {HOLDS: EXIT_OK, FAILS: EXIT_FAILED}.get(v.outcome, EXIT_INVALID)


def _cmd_pde_tau(args):
    from .embeddings import pde_regularity_tau
    tau = pde_regularity_tau(args.m, args.a, args.d, args.delta,
                             a_bar=args.a_bar)
    print(tau)
    return EXIT_OK


def _cmd_adaptivity(args):
    from .embeddings import adaptivity_scale
    print(adaptivity_scale(args.d, args.m))
    return EXIT_OK


def _cmd_norm(args):
    from .geometry import ModelDomain
    from .norms import (SpaceParams, kondratiev_norm, sobolev_norm,
                        kondratiev_sharp_norm, rloc_norm_localized,
                        rloc_norm_weighted)
    from .geometry import whitney_cover, PartitionOfUnity
    from .testfns import make_test_function, kondratiev_membership
    domain = ModelDomain(args.d, args.ell)
    u = make_test_function(args.beta, args.lam, args.R, domain)
    r = max(int(math.ceil(2 * args.R)), 1)
    cover = whitney_cover(domain, ((-r,) * args.d, (r,) * args.d),
                          args.j_max)
    tau = args.tau if args.tau is not None and args.tau > 0 else None
    params = SpaceParams(m=args.m, a=args.a, p=args.p, d=args.d,
                         ell=args.ell, tau=tau)
    member = kondratiev_membership(u, args.m, args.a, args.p).member
    if args.kind == "kondratiev":
        nv = kondratiev_norm(u, params, cover, args.nodes,
                             oracle_member=member)
    elif args.kind == "sobolev":
        nv = sobolev_norm(u, args.m, args.p, cover, args.nodes)
    elif args.kind == "sharp":
        nv = kondratiev_sharp_norm(u, params, cover, args.nodes)
    elif args.kind == "rloc-weighted":
        nv = rloc_norm_weighted(u, params, cover, args.nodes)
    else:
        pou = PartitionOfUnity(cover)
        nv = rloc_norm_localized(u, params, cover, pou, args.nodes)
    stats = nv.to_json()
    stats["oracleMember"] = member
    return _emit(args, f"norm-{args.kind}",
                 _run_config(args, {"function": u.to_json()}), stats,
                 passed=True)


def _cmd_whitney(args):
    from .geometry import ModelDomain, whitney_cover
    domain = ModelDomain(args.d, args.ell)
    r = args.radius
    cover = whitney_cover(domain, ((-r,) * args.d, (r,) * args.d),
                          args.j_max)
    stats = {"counts": {str(j): c for j, c in sorted(cover.counts.items())},
             "totalVolume": cover.total_volume(),
             "boxVolume": cover.box_volume(),
             "uncoveredVolume": cover.uncovered_volume}
    rows = [("level", "k", "dist")]
    data = json.loads(cover.to_json())
    for rec in data["cubes"]:
        rows.append((rec["level"], " ".join(map(str, rec["k"])),
                     rec["dist"]))
    return _emit(args, "whitney", _run_config(args), stats, passed=True,
                 csv_rows=rows)


def _csvable(result):
    """Normalize an experiment result into (stats, passed, csv_rows)."""
    if hasattr(result, "csv_rows"):       # RatioReport / DivergenceReport
        stats = result.to_json()
        return stats, result.passed, list(result.csv_rows())
    if isinstance(result, dict):
        passed = result.get("passed", False)
        rows = None
        for key, header in (("rows", None), ("cells", None),
                            ("cases", None)):
            if key in result and result[key]:
                items = result[key]
                cols = sorted(items[0].keys()) if isinstance(items[0], dict) \
                    else None
                if cols:
                    rows = [tuple(cols)] + [tuple(it[c] for c in cols)
                                            for it in items]
                break
        stats = {k: v for k, v in result.items()
                 if k not in ("rows", "cells", "cases")}
        return stats, passed, rows
    return {"result": result}, bool(result), None


def _cmd_verify(args):
    from .verify import EXPERIMENTS, check_counterexample_divergence
    name = args.name
    if name in ("counterexample", "divergence") and args.m is not None:
        result = check_counterexample_divergence(
            m=args.m, a=args.a if args.a is not None else 0.0,
            p=args.p if args.p is not None else 2.0,
            tau=args.tau if args.tau is not None else 1.0,
            d=args.d, delta=args.delta,
            lam=args.lam if args.lam is not None else 0.0)
        name = "divergence"
    elif name in EXPERIMENTS:
        result = EXPERIMENTS[name]()
        if hasattr(result, "to_json"):
            pass
    else:
        print(f"unknown experiment {name!r}; known: "
              f"{', '.join(sorted(EXPERIMENTS))}", file=sys.stderr)
        return EXIT_INVALID
    if isinstance(result, dict) and "ratios" in result:
        # registry entries already serialized ratio reports
        stats, passed = result, result.get("passed", False)
        rows = [("ratio",)] + [(r,) for r in result["ratios"]]
    else:
        stats, passed, rows = _csvable(result)
    return _emit(args, name, _run_config(args), stats, passed, rows)


def _recompute_from_csv(name, rows, stored):
    """Recompute the headline statistic of a stored run from its CSV."""
    if not rows:
        return None
    header = rows[0]
    body = rows[1:]
    if "ratio" in header:
        i = header.index("ratio")
        ratios = [float(r[i]) for r in body]
        if not ratios:
            return None
        return {"spread": max(ratios) / min(ratios)}
    if header[:2] == ["eps", "value"]:
        return {"ladderLength": len(body),
                "monotone": all(float(body[i][1]) <= float(body[i + 1][1])
                                for i in range(len(body) - 1))}
    if "agree" in header:
        i = header.index("agree")
        return {"pass": all(r[i] == "True" for r in body)}
    if "verdict" in header and "literal" in header:
        iv, il = header.index("verdict"), header.index("literal")
        return {"pass": all(r[iv] == r[il] for r in body)}
    if "passed" in header:
        i = header.index("passed")
        return {"pass": all(r[i] == "True" for r in body)}
    return None


def _cmd_report(args):
    outdir = Path(args.out)
    if not outdir.is_dir():
        print(f"no such directory: {outdir}", file=sys.stderr)
        return EXIT_INVALID
    ok = True
    found = False
    for jf in sorted(outdir.glob("*.json")):
        doc = json.loads(jf.read_text())
        if doc.get("schema") != SCHEMA:
            continue
        found = True
        name = doc["experiment"]
        cf = outdir / f"{name}.csv"
        line = {"experiment": name, "pass": doc["pass"]}
        if cf.exists():
            with open(cf, newline="") as fh:
                rows = list(csv.reader(fh))
            recomputed = _recompute_from_csv(name, rows, doc)
            if recomputed is not None:
                line["recomputed"] = recomputed
                if "spread" in recomputed:
                    stored = doc["statistics"].get("spread")
                    match = stored is not None and math.isclose(
                        recomputed["spread"], stored, rel_tol=1e-12)
                    line["roundTrip"] = match
                    ok = ok and match
                elif "pass" in recomputed:
                    line["roundTrip"] = recomputed["pass"] == doc["pass"]
                    ok = ok and line["roundTrip"]
        ok = ok and doc["pass"]
        print(json.dumps(line))
    if not found:
        print("no stored reports found", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK if ok else EXIT_FAILED


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_space_args(sp, tau_default=None):
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--tau", type=float, default=tau_default,
                    required=tau_default is None)
    sp.add_argument("--d", type=int, required=True)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="klab",
        description="Kondratiev / refined-localization space laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("decide", help="embedding K^m_{a,p} -> F-rloc")
    _add_space_args(sp)
    sp.add_argument("--delta", type=int, required=True)
    sp.set_defaults(func=_cmd_decide)

    sp = sub.add_parser("decide-reverse", help="reverse embedding")
    _add_space_args(sp)
    sp.add_argument("--delta", type=int, required=True)
    sp.set_defaults(func=_cmd_decide_reverse)

    sp = sub.add_parser("decide-holder", help="Hoelder-route sufficiency")
    _add_space_args(sp)
    sp.add_argument("--ell", type=int, required=True)
    sp.set_defaults(func=_cmd_decide_holder)

    sp = sub.add_parser("pde-tau", help="critical tau for PDE regularity")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--delta", type=int, required=True)
    sp.add_argument("--a-bar", type=float, default=None)
    sp.set_defaults(func=_cmd_pde_tau)

    sp = sub.add_parser("adaptivity", help="adaptivity scale tau(d, m)")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.set_defaults(func=_cmd_adaptivity)

    sp = sub.add_parser("norm", help="evaluate a norm of rho^beta family")
    sp.add_argument("--kind", choices=["kondratiev", "sobolev", "sharp",
                                       "rloc-weighted", "rloc-localized"],
                    required=True)
    _add_space_args(sp, tau_default=-1.0)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--lambda", dest="lam", type=float, default=0.0)
    sp.add_argument("--R", type=float, default=1.0)
    sp.add_argument("--j-max", type=int, default=12)
    sp.add_argument("--nodes", type=int, default=8)
    sp.add_argument("--out", type=str, default=None)
    sp.set_defaults(func=_cmd_norm)

    sp = sub.add_parser("whitney", help="construct a Whitney cover")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--radius", type=int, default=2)
    sp.add_argument("--j-max", type=int, default=8)
    sp.add_argument("--out", type=str, default=None)
    sp.set_defaults(func=_cmd_whitney)

    sp = sub.add_parser("verify", help="run a named experiment")
    sp.add_argument("name")
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--a", type=float, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--tau", type=float, default=None)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--delta", type=int, default=0)
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--out", type=str, default=None)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("report", help="regenerate summaries from a run dir")
    sp.add_argument("--out", type=str, required=True)
    sp.set_defaults(func=_cmd_report)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else 0
    _thread_cap()
    from .errors import KlabError
    try:
        return args.func(args)
    except KlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
