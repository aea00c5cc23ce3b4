"""Command-line entry point.

Exit codes: 0 success (or search exhausted), 2 a budget was hit, 1 error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import artifacts as art
from . import bundles as bmod
from . import checks, compat, cover, graphcore, kernels, permgrp, search
from .cliques import LineIndex, enumerate_candidate_lines, lines_from_text, lines_to_text

EXIT_OK, EXIT_ERROR, EXIT_CAP = 0, 1, 2

CASE_COLUMNS = ["class", "stab", "p2", "N", "l", "N1", "N2", "N3", "H", "max_level", "nodes", "wall_s"]

log = logging.getLogger("mclsearch")


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _depth(text: str) -> int | None:
    if text in ("full", "none"):
        return None
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("depth must be >= 0 or 'full'")
    return v


def _load_graph(path: str | None) -> graphcore.Graph:
    if path:
        return graphcore.Graph.from_text(Path(path).read_text())
    return graphcore.mclaughlin_graph()


def _load_lines(args) -> LineIndex:
    g = _load_graph(getattr(args, "graph", None))
    if getattr(args, "lines", None):
        return LineIndex(g, lines_from_text(Path(args.lines).read_text()))
    from .cliques import mclaughlin_lines
    return mclaughlin_lines() if not getattr(args, "graph", None) else LineIndex(g, enumerate_candidate_lines(g))


def _round_n1(x: Fraction) -> int:
    return int(x + Fraction(1, 2))


# --- commands ---

def cmd_build_graph(args) -> int:
    gens = (graphcore.parse_generators(Path(args.generators).read_text())
            if args.generators else list(graphcore.mclaughlin_generators()))
    g = graphcore.build_graph(gens)
    chain = permgrp.schreier_sims(gens)
    params = graphcore.srg_params(g)
    n_lines = len(enumerate_candidate_lines(g))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    art.atomic_write(out / "graph.txt", g.to_text())
    values = {"group_order": chain.order, "vertices": g.n, "edges": g.n_edges,
              "srg": tuple(params), "global_parameters": str(params.global_parameters()).replace(" ", ""),
              "lines": n_lines}
    art.write_report(out, "build-graph", ["quantity", "value"], list(values.items()), values)
    print(art.format_table(["quantity", "value"], list(values.items())), end="")
    return EXIT_OK


def cmd_enum_lines(args) -> int:
    g = _load_graph(args.graph)
    lines = enumerate_candidate_lines(g)
    idx = LineIndex(g, lines)
    out = Path(args.out)
    art.atomic_write(out / "lines.txt", lines_to_text(lines))
    per_v = sorted({len(idx.by_vertex[v]) for v in g.vertices})
    values = {"lines": len(lines), "per_vertex": per_v, "checksum": idx.checksum(),
              "first": lines[0] if lines else ""}
    art.write_report(out, "enum-lines", ["quantity", "value"], list(values.items()), values)
    print(art.format_kv(values), end="")
    return EXIT_OK


def cmd_enum_bundles(args) -> int:
    idx = _load_lines(args)
    out = Path(args.out)
    p = args.point
    if args.budget is not None:
        res = cover.enumerate_bundles(idx, p, budget=args.budget)
        values = {"point": p, "bundles": res.count, "nodes": res.nodes, "complete": res.complete}
        art.write_report(out, "enum-bundles", ["quantity", "value"], list(values.items()), values)
        print(art.format_kv(values), end="")
        return EXIT_OK if res.complete else EXIT_CAP
    U = permgrp.point_stabilizer(search.group_chain(), p)
    recs = bmod.classify_all_bundles(idx, U, p, workers=args.workers,
                                     progress=lambda i, n, tot, dt: log.info("branch %d/%d: %d bundles", i, n, tot))
    art.atomic_write(out / "classes.txt", bmod.format_class_table(recs, idx.checksum()))
    rows = [(r.cls.class_id, r.cls.old, r.cls.refined.s, *r.cls.refined.t, r.stab_order, r.orbit_size,
             "rejected" if r.cls.rejected else "") for r in recs]
    cols = ["class", "old", "s", *[f"t{i}" for i in range(1, 11)], "stab", "orbit", "note"]
    total = sum(r.orbit_size for r in recs)
    values = {"point": p, "bundles": total, "classes": len(recs),
              "rejected": [r.cls.class_id for r in recs if r.cls.rejected]}
    art.write_report(out, "enum-bundles", cols, rows, values)
    print(art.format_table(cols, rows), end="")
    print(art.format_kv(values), end="")
    return EXIT_OK


def _read_bundles(args) -> list[tuple[int, ...]]:
    if args.bundle:
        return [tuple(int(x) for x in args.bundle.replace(",", " ").split())]
    text = Path(args.bundles).read_text()
    return [tuple(map(int, ln.split())) for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


def cmd_classify(args) -> int:
    idx = _load_lines(args)
    rows = []
    for b in _read_bundles(args):
        if len(b) != cover.BUNDLE_SIZE:
            raise UsageError(f"a bundle has 28 lines, got {len(b)}")
        p = bmod.bundle_apex(idx, b)
        if not cover.is_bundle(idx, p, b):
            raise UsageError(f"lines {b[:3]}... do not form a bundle")
        key = tuple(int(x) for x in bmod.apex_tables(idx, p).invariants_global(np.asarray([b], np.int32))[0])
        cls = bmod.classify_key(key)
        rows.append((cls.class_id, p, *key, "rejected" if cls.rejected else ""))
    cols = ["class", "apex", "old", "s", *[f"t{i}" for i in range(1, 11)], "note"]
    print(art.format_table(cols, rows), end="")
    if args.out:
        art.write_report(args.out, "classify", cols, rows, {"bundles": len(rows)})
    return EXIT_OK


def cmd_pair_stats(args) -> int:
    idx = _load_lines(args)
    b1 = search.representative(args.class_id)
    stab = search.stabilizer_elements(idx, b1, 1)
    sp = search.choose_second_point(idx, b1, stab, 1, only=None if args.p2 is None else [args.p2])
    rows = [(r, l, n, f"{float(Fraction(n * l, len(stab))):.1f}", "*" if r == sp.p2 else "")
            for r, l, n in sp.candidates]
    cols = ["p2", "l", "N", "N1", "chosen"]
    values = {"class": args.class_id, "stab": len(stab), "p2": sp.p2, "l": sp.l, "N": sp.N,
              "N1": _round_n1(sp.N1), "orbits": len(sp.candidates)}
    print(art.format_table(cols, rows), end="")
    print(art.format_kv(values), end="")
    if args.out:
        art.write_report(args.out, f"pair-stats-{args.class_id}", cols, rows, values)
    return EXIT_OK


def _needs_budget(class_id: int) -> bool:
    days = search.table3().get(class_id, (0, 0, 0))[0]
    return days > 1


def cmd_run_case(args) -> int:
    c = args.class_id
    if args.depth != 0 and _needs_budget(c) and args.budget is None and args.seconds is None:
        raise UsageError(f"class {c} is a large case; pass --budget or --seconds (or --depth 0)")
    idx = _load_lines(args)
    cfg = search.CaseConfig(depth=args.depth, p2=args.p2, n=args.n, u=args.u, workers=args.workers,
                            node_budget=args.budget, seconds=args.seconds, max_seeds=args.max_seeds,
                            checkpoint=args.checkpoint)
    rec, seeds = search.run_case(c, cfg, idx, progress=lambda s: log.info(s))
    out = Path(args.out)
    if args.seeds_dir:
        b1 = search.representative(c)
        for i, b2 in enumerate(seeds):
            art.atomic_write(Path(args.seeds_dir) / f"case{c}_seed{i:05d}.txt",
                             art.format_seed(1, rec.p2, b1, [int(x) for x in b2], idx.checksum()))
    level = "" if rec.max_level is None else rec.max_level
    row = (c, rec.stab_order, rec.p2, rec.N, rec.l, _round_n1(rec.N1), rec.N2, rec.N3, rec.H,
           level, rec.nodes)
    values = {"class": c, "stab": rec.stab_order, "p2": rec.p2, "N": rec.N, "l": rec.l,
              "N1": str(rec.N1), "N2": rec.N2, "N3": rec.N3, "H": rec.H, "max_level": level,
              "nodes": rec.nodes, "outcome": rec.outcome, "seeds_run": len(rec.seeds)}
    # wall time stays out of the report so reruns are byte-identical
    art.write_report(out, f"case-{c}", CASE_COLUMNS[:-1], [row], values)
    if rec.seeds:
        seed_rows = [(s.ordinal, s.b2_class, ",".join(map(str, s.points)), s.outcome, s.max_level, s.nodes)
                     for s in rec.seeds]
        art.atomic_write(out / f"case-{c}.seeds.txt",
                         art.format_table(["seed", "b2_class", "points", "outcome", "max_level", "nodes"],
                                          seed_rows))
    art.atomic_write(out / f"case-{c}.timing", f"wall_seconds={rec.wall:.3f}\n")
    print(art.format_table(CASE_COLUMNS, [row + (f"{rec.wall:.1f}",)]), end="")
    print(f"outcome={rec.outcome}")
    return EXIT_CAP if rec.outcome == search.CAP_HIT else EXIT_OK


def cmd_select_points(args) -> int:
    idx = _load_lines(args)
    text = Path(args.seed).read_text()
    art.require_checksum(text, idx.checksum(), "seed file")
    p1, p2, b1, b2 = art.parse_seed(text)
    g = idx.graph
    S = search.common_non_neighbors(g, p1, p2)
    costs = search.point_costs(idx, b1, b2, S)
    pts = search.select_point_set(g, costs, args.n, args.u)
    rows = [(p, costs[p]) for p in pts]
    values = {"p1": p1, "p2": p2, "S": len(S), "points": pts, "sum": sum(costs[p] for p in pts)}
    print(art.format_table(["point", "B"], rows), end="")
    print(art.format_kv(values), end="")
    if args.out:
        art.write_report(args.out, "select-points", ["point", "B"], rows, values)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.lines:
        text = Path(args.lines).read_text()
        g = graphcore.mclaughlin_graph()
        got = LineIndex(g, lines_from_text(text)).checksum() if text.strip() else "empty"
        want = bmod.header_checksum(bmod.class_table_text())
        line = checks.CheckResult("lines file checksum", got == want, f"got={got} want={want}")
        print(line.line())
        if got != want:
            return EXIT_ERROR
    suite = checks.FAST_CHECKS if args.suite == "fast" else checks.FAST_CHECKS + checks.LONG_CHECKS
    print(f"backend={kernels.BACKEND}")
    results = checks.run_checks(suite)
    failed = [r for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} passed")
    return EXIT_ERROR if failed else EXIT_OK


# --- parser ---

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mclsearch", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        return p

    p = add("build-graph", cmd_build_graph, "build the graph from generators and report its parameters")
    p.add_argument("--generators", help="cycle-notation generator file (default: embedded)")
    p.add_argument("--out", default=".")

    p = add("enum-lines", cmd_enum_lines, "enumerate candidate lines")
    p.add_argument("--graph")
    p.add_argument("--out", default=".")

    p = add("enum-bundles", cmd_enum_bundles, "bundle census and class table at a point")
    p.add_argument("--point", type=int, default=1)
    p.add_argument("--budget", type=_positive, help="node budget; counts only")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--graph")
    p.add_argument("--lines")
    p.add_argument("--out", default=".")

    p = add("classify", cmd_classify, "classify bundles by invariant")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--bundle", help="28 line ids")
    grp.add_argument("--bundles", help="file with one bundle per line")
    p.add_argument("--graph")
    p.add_argument("--lines")
    p.add_argument("--out")

    p = add("pair-stats", cmd_pair_stats, "second-point candidates for a class")
    p.add_argument("--class", dest="class_id", type=int, required=True)
    p.add_argument("--p2", type=int)
    p.add_argument("--graph")
    p.add_argument("--lines")
    p.add_argument("--out")

    p = add("run-case", cmd_run_case, "run one case of the search")
    p.add_argument("--class", dest="class_id", type=int, required=True)
    p.add_argument("--depth", type=_depth, default=None, help="backtrack depth limit, 0 = enumerate only")
    p.add_argument("--budget", type=_positive, help="node budget per task")
    p.add_argument("--seconds", type=_positive_float, help="wall-clock budget per seed")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--max-seeds", type=_positive)
    p.add_argument("--p2", type=int)
    p.add_argument("--n", type=_positive, default=search.DEFAULT_N)
    p.add_argument("--u", type=_positive, default=search.DEFAULT_U)
    p.add_argument("--checkpoint")
    p.add_argument("--seeds-dir")
    p.add_argument("--graph")
    p.add_argument("--lines")
    p.add_argument("--out", default=".")

    p = add("select-points", cmd_select_points, "choose the independent point set for a seed")
    p.add_argument("--seed", required=True)
    p.add_argument("--n", type=_positive, default=search.DEFAULT_N)
    p.add_argument("--u", type=_positive, default=search.DEFAULT_U)
    p.add_argument("--graph")
    p.add_argument("--lines")
    p.add_argument("--out")

    p = add("verify", cmd_verify, "run the invariant suites")
    p.add_argument("--suite", choices=["fast", "long"], default="fast")
    p.add_argument("--lines", help="also check a lines file against the canonical checksum")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(message)s", stream=sys.stderr)
    if getattr(args, "n", None) is not None and args.n > 105:
        print("error: n must be at most 105", file=sys.stderr)
        return EXIT_ERROR
    t0 = time.monotonic()
    try:
        code = args.fn(args)
    except (UsageError, ValueError, OSError, art.ChecksumMismatch, search.NoPointSet) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    log.info("%s finished in %.1fs", args.command, time.monotonic() - t0)
    return code


if __name__ == "__main__":
    sys.exit(main())
