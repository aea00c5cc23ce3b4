"""Named acceptance checks shared by ``mclsearch verify`` and the test-suite.

Every check returns a :class:`CheckResult`; none of them raise on a failed
comparison.  Sampling is seeded explicitly so reruns see the same data.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import bundles as bmod
from . import compat, cover, graphcore, permgrp, search
from .cliques import LineIndex, maximal_cliques, mclaughlin_lines
from .perm import Perm, identity, mul

GROUP_ORDER = 1796256000
APEX_ORDER = 6531840
FIRST_LINE = (1, 2, 17, 45, 193)
GLOBAL_PARAMS = [[0, 0, 112], [1, 30, 81], [56, 56, 0]]
HEURISTIC = 0.04454


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}  {self.detail}".rstrip()


# --- deterministic samplers ---

def random_element(gens: Sequence[Perm], rng: random.Random, length: int = 40) -> Perm:
    g = identity(len(gens[0]))
    for _ in range(length):
        g = mul(g, rng.choice(gens))
    return g


def bundle_image(idx: LineIndex, bundle: Sequence[int], g: Perm) -> tuple[int, ...]:
    pos = idx.position
    return tuple(sorted(pos[tuple(sorted(g[v] for v in idx.lines[l]))] for l in bundle))


def base_bundles(idx: LineIndex, p: int = 1) -> list[tuple[int, ...]]:
    """The first bundle in each root branch of the cover instance at ``p``."""
    inst = cover.bundle_instance(idx, p)
    out = []
    for r in cover.partition_rows(inst):
        flat, offs, _ = inst.solver.collect(first_row=r, limit=1)
        out.append(inst.label(flat[offs[0]:offs[1]].tolist()))
    return out


def sample_bundles_at(idx: LineIndex, apex: int, count: int, rng: random.Random,
                      base: Sequence[Sequence[int]] | None = None) -> list[tuple[int, ...]]:
    """Random images of base bundles at point 1, moved to ``apex``."""
    U = search.apex_group(1)
    G = search.group_chain()
    base = base or base_bundles(idx, 1)
    if apex == 1:
        t = identity(idx.graph.n + 1)
    else:
        t = _mover(G, apex)
    ugens = U.strong_generators
    out = []
    for _ in range(count):
        u = random_element(ugens, rng, 30)
        out.append(bundle_image(idx, rng.choice(base), mul(u, t)))
    return out


def _mover(G: permgrp.StabilizerChain, q: int) -> Perm:
    """A group element sending 1 to ``q``."""
    if G.base[0] != 1:
        raise ValueError("chain base must start at 1")
    return G.transversals[0][q]


# --- fast checks ---

def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    t0 = time.monotonic()
    try:
        ok, detail = fn()
    except Exception as e:  # a crash is a failure, reported not raised
        ok, detail = False, f"{type(e).__name__}: {e}"
    return CheckResult(name, ok, detail, time.monotonic() - t0)


def check_group_orders() -> CheckResult:
    def run():
        G = search.group_chain()
        U = search.apex_group(1)
        return (G.order == GROUP_ORDER and U.order == APEX_ORDER,
                f"|G|={G.order} |U|={U.order}")
    return _timed("group orders 1796256000 / 6531840", run)


def check_graph() -> CheckResult:
    def run():
        g = graphcore.mclaughlin_graph()
        p = graphcore.srg_params(g)
        ok = (g.n == 275 and g.n_edges == 15400 and tuple(p) == (275, 112, 30, 56)
              and p.global_parameters() == GLOBAL_PARAMS)
        return ok, f"v={g.n} e={g.n_edges} srg={tuple(p)} gp={p.global_parameters()}"
    return _timed("graph 275/15400, SRG(275,112,30,56)", run)


def check_lines() -> CheckResult:
    def run():
        g = graphcore.mclaughlin_graph()
        t0 = time.monotonic()
        lines = maximal_cliques(g)
        dt = time.monotonic() - t0
        idx = LineIndex(g, lines)
        per_v = {len(idx.by_vertex[v]) for v in g.vertices}
        per_e = {len(idx.by_edge.get(e, ())) for e in g.edges()}
        sizes = {len(ln) for ln in lines}
        triangles = g.n * 112 * 30 // 6
        ok = (len(lines) == 15400 and per_v == {280} and per_e == {10} and sizes == {5}
              and len(idx.by_triple) == triangles and dt < 60)
        return ok, (f"lines={len(lines)} per_vertex={sorted(per_v)} per_edge={sorted(per_e)} "
                    f"clique_sizes={sorted(sizes)} triangles={len(idx.by_triple)} t={dt:.1f}s")
    return _timed("candidate lines 15400 (280/vertex, 10/edge, 1/triangle, no 6-clique)", run)


def check_first_line() -> CheckResult:
    def run():
        idx = mclaughlin_lines()
        G = search.group_chain()
        orb = permgrp.orbit(list(G.strong_generators), FIRST_LINE, action="sets")
        mi = permgrp.minimal_image(G, FIRST_LINE)
        ok = FIRST_LINE in idx.position and len(orb) == 15400 and tuple(mi) == FIRST_LINE
        return ok, f"orbit={len(orb)} min_image={tuple(mi)}"
    return _timed("line {1,2,17,45,193} is lex-min of the single line orbit", run)


def check_frame() -> CheckResult:
    def run():
        g = graphcore.mclaughlin_graph()
        q = graphcore.non_neighbors(g, 1)[0]
        fr = compat.gewirtz_frame(g, 1, q)
        p = graphcore.srg_params(fr.subgraph)
        ok = len(fr.vertices) == 56 and len(fr.edges) == 280 and tuple(p) == (56, 10, 0, 2)
        return ok, f"pair={fr.pair} v={len(fr.vertices)} e={len(fr.edges)} srg={tuple(p)}"
    return _timed("common neighbourhood is SRG(56,10,0,2) with 280 edges", run)


def check_feasible_counts(samples: int = 120, seed: int = 7) -> CheckResult:
    def run():
        idx = mclaughlin_lines()
        g = idx.graph
        rng = random.Random(seed)
        bs = sample_bundles_at(idx, 1, samples, rng)
        far, near = set(), set()
        for b in bs:
            q = rng.choice(graphcore.non_neighbors(g, 1))
            r = rng.choice(g.neighbors[1])
            far.add(len(compat.feasible_lines(idx, b, 1, q)))
            near.add(len(compat.feasible_lines(idx, b, 1, r)))
        ok = far == {252} and near == {243}
        return ok, f"pairs={2 * samples} nonadjacent={sorted(far)} adjacent={sorted(near)}"
    return _timed("feasible lines 252 nonadjacent / 243 adjacent", run)


def check_heuristic() -> CheckResult:
    def run():
        x = compat.heuristic_disjoint_probability()
        ok = abs(float(x) - HEURISTIC) < 5e-6 and isinstance(x, Fraction)
        return ok, f"C(252,28)/C(280,28) = {float(x):.7f}"
    return _timed("binomial heuristic ~ 0.04454", run)


def check_fingerprint_equivalence(n_frames: int = 5, per_side: tuple[int, int] = (200, 1000),
                                  seed: int = 11) -> CheckResult:
    def run():
        idx = mclaughlin_lines()
        g = idx.graph
        rng = random.Random(seed)
        base = base_bundles(idx, 1)
        qs = rng.sample(list(graphcore.non_neighbors(g, 1)), n_frames)
        left = np.asarray(sample_bundles_at(idx, 1, per_side[0], rng, base), dtype=np.int32)
        pairs = disagree = compatible = 0
        for q in qs:
            right = np.asarray(sample_bundles_at(idx, q, per_side[1], rng, base), dtype=np.int32)
            fr = compat.gewirtz_frame(g, 1, q)
            fl = compat.fingerprint_words(idx, left, fr, 1)
            fq = compat.fingerprint_words(idx, right, fr, q)
            ia = np.repeat(np.arange(len(left)), len(right))
            ib = np.tile(np.arange(len(right)), len(left))
            fast = ~((fl[ia] & fq[ib]) != 0).any(axis=1)
            slow = compat.naive_compatible_batch(idx, left[ia], right[ib])
            pairs += len(ia)
            disagree += int((fast != slow).sum())
            compatible += int(slow.sum())
        ok = disagree == 0 and pairs >= 10 ** 6 and 0 < compatible < pairs
        return ok, f"pairs={pairs} frames={n_frames} compatible={compatible} disagreements={disagree}"
    return _timed("fingerprint test agrees with naive line-pair test", run)


def check_invariant_identities(samples: int = 12, seed: int = 3) -> CheckResult:
    def run():
        idx = mclaughlin_lines()
        rng = random.Random(seed)
        bad = []
        for b in sample_bundles_at(idx, 1, samples, rng):
            L = bmod.l_lines(b, idx, 1)
            r = bmod.refined_invariant(b, idx, apex=1)
            grid = bmod.grid_invariant(b, idx, 1)
            P = set(graphcore.non_neighbors(idx.graph, 1))
            three = all(len(set(idx.lines[m]) & P) == 3 for m in L)
            weight = sum((i + 1) * t for i, t in enumerate(r.t))
            if not (len(L) == 1512 and weight == 4536 and three and 0 <= grid <= 63):
                bad.append(b)
        return not bad, f"bundles={samples} failures={len(bad)}"
    return _timed("per-bundle identities |L|=1512, sum i*t_i=4536, |C cap P|=3, grid in [0,63]", run)


def check_case_order() -> CheckResult:
    expected = [10, 16, 22, 27, 30, 34, 36, 13, 14, 20, 24, 2, 19, 1, 15, 5, 4, 3, 6, 7,
                21, 11, 12, 26, 18, 31, 25, 23, 33, 32, 8, 9, 28, 35, 17, 29]

    def run():
        got = search.fixture_order()
        return got == expected, " ".join(map(str, got))
    return _timed("case order by H with manual override", run)


def check_class_fixture() -> CheckResult:
    """Embedded class representatives reproduce the reference class table (invariants and |Stab|)."""
    def run():
        idx = mclaughlin_lines()
        U = search.apex_group(1)
        table = {c.class_id: c for c in bmod.table1()}
        reps = bmod.representatives()
        tables = bmod.apex_tables(idx, 1)
        inv = tables.invariants_global(np.asarray([reps[c] for c in sorted(reps)], dtype=np.int32))
        bad = []
        for c, row in zip(sorted(reps), inv):
            stab = len(bmod.bundle_stabilizer(idx, U, reps[c], 1))
            if tuple(int(x) for x in row) != table[c].key or stab != table[c].stab_order:
                bad.append(c)
        total = sum(APEX_ORDER // table[c].stab_order for c in table)
        ok = not bad and sorted(reps) == sorted(table) and total == bmod.N_BUNDLES
        return ok, f"classes={len(reps)} mismatches={bad} orbit_total={total}"
    return _timed("class representatives match the reference class table", run)


FAST_CHECKS = [check_group_orders, check_graph, check_lines, check_first_line, check_frame,
               check_feasible_counts, check_heuristic, check_fingerprint_equivalence,
               check_invariant_identities, check_case_order, check_class_fixture]


def run_checks(checks: Sequence[Callable[[], CheckResult]], out=print) -> list[CheckResult]:
    results = []
    for fn in checks:
        r = fn()
        out(r.line())
        results.append(r)
    return results


def check_rejection() -> CheckResult:
    """Exactly the classes with t10 > 0 have a pair whose 10 covering lines are all incompatible."""
    def run():
        idx = mclaughlin_lines()
        reps = bmod.representatives()
        found, bad = [], []
        for c in sorted(reps):
            w = bmod.rejection_witness(reps[c], idx)
            if w is not None:
                pair, cov = w
                sets = [set(idx.lines[l]) for l in reps[c]]
                dead = all(any(len(set(idx.lines[m]) & s) == 2 for s in sets) for m in cov)
                if not (dead and len(cov) == 10):
                    bad.append(c)
                found.append(c)
        expected = search.rejected_classes()
        return found == expected and not bad, f"rejected={found} expected={expected} bad_witness={bad}"
    return _timed("rejected classes are exactly those with t10 > 0, with witnesses", run)


def check_case_pipeline(class_id: int) -> Callable[[], CheckResult]:
    def check() -> CheckResult:
        def run():
            row = {r.class_id: r for r in search.table2()}[class_id]
            rec, _ = search.run_case(class_id, search.CaseConfig(depth=0))
            got = (rec.stab_order, rec.p2, rec.l, rec.N, rec.N2, rec.N3, rec.H)
            exp = (row.stab, row.p2, row.l, row.N, row.N2, row.N3, row.H)
            ok = got == exp and abs(rec.N1 - row.N1) < 1
            return ok, f"(stab,p2,l,N,N2,N3,H) got={got} table={exp} N1={float(rec.N1):.2f}"
        return _timed(f"case {class_id} pipeline matches the reference case table", run)
    check.__name__ = f"check_case_{class_id}"
    return check


def check_table2_rows() -> CheckResult:
    def run():
        bad = []
        for row in search.table2():
            rec, _ = search.run_case(row.class_id, search.CaseConfig(depth=0))
            got = (rec.stab_order, rec.p2, rec.l, rec.N, rec.N2, rec.N3, rec.H)
            if got != (row.stab, row.p2, row.l, row.N, row.N2, row.N3, row.H) or abs(rec.N1 - row.N1) >= 1:
                bad.append((row.class_id, got))
        return not bad, f"rows={len(search.table2())} mismatches={bad}"
    return _timed("all 30 reference case table rows reproduced", run)


def check_census() -> CheckResult:
    def run():
        idx = mclaughlin_lines()
        recs = bmod.classify_all_bundles(idx, search.apex_group(1), 1)
        table = {c.class_id: c for c in bmod.table1()}
        total = sum(r.orbit_size for r in recs)
        mism = [r.cls.class_id for r in recs
                if r.stab_order != table[r.cls.class_id].stab_order
                or r.orbit_size * r.stab_order != APEX_ORDER]
        embedded = bmod.representatives()
        reps_same = all(embedded[r.cls.class_id] == r.rep for r in recs)
        ok = total == bmod.N_BUNDLES and len(recs) == 36 and not mism and reps_same
        return ok, f"bundles={total} classes={len(recs)} mismatches={mism} embedded_reps_equal={reps_same}"
    return _timed("census at point 1: 17729280 bundles in 36 classes matching the reference class table", run)


# --- backtrack certification ---

def seed_problems(class_id: int, count: int | None = None, with_fingerprints: bool = True):
    """(ordinal, problem) for the first ``count`` seeds of a case, cancellation applied."""
    idx = mclaughlin_lines()
    rec, seeds = search.run_case(class_id, search.CaseConfig(depth=0))
    b1 = search.representative(class_id)
    cancelled = search.cancelled_before(class_id)
    g = idx.graph
    S = search.common_non_neighbors(g, 1, rec.p2)
    n = len(seeds) if count is None else min(count, len(seeds))
    for i in range(n):
        b2 = tuple(int(x) for x in seeds[i])
        pts = search.select_point_set(g, search.point_costs(idx, b1, b2, S))
        yield i, search.build_problem(idx, b1, b2, pts, cancelled, with_fingerprints)


def check_engine_agreement(class_id: int = 35, seeds: int = 20, depth: int = 3) -> CheckResult:
    def run():
        idx = mclaughlin_lines()
        nodes = deep = 0
        bad = []
        for i, prob in seed_problems(class_id, seeds):
            t1, t2 = [], []
            r1, _ = search.search_subtree(search.FingerprintFilter(prob), prob, (), depth, trace=t1)
            r2, _ = search.search_subtree(search.NaiveFilter(prob, idx), prob, (), depth, trace=t2)
            if r1 != r2 or t1 != t2:
                bad.append(i)
            nodes += len(t1)
            deep += sum(1 for pre, _ in t1 if len(pre) >= 1)
        ok = not bad and nodes > seeds and deep > 0
        return ok, f"case={class_id} seeds={seeds} depth<={depth} nodes={nodes} below_root={deep} mismatched={bad}"
    return _timed("fingerprint and naive engines build identical truncated trees", run)


def check_worker_independence(class_id: int = 35, workers=(1, 4, 16), split_depth: int = 2) -> CheckResult:
    def run():
        for i, prob in seed_problems(class_id):
            if min(len(a) for a in prob.arenas.values()) > 0:
                break
        else:
            return False, "no seed with a nonempty root"
        outs = []
        for w in workers:
            r = search.backtrack(prob, workers=w, split_depth=split_depth)
            outs.append((r.outcome, r.stats.max_level, r.stats.nodes, r.tasks))
        ok = len(set(outs)) == 1 and outs[0][3] > 1
        return ok, f"seed={i} (outcome,max_level,nodes,tasks) per workers {list(workers)}: {outs}"
    return _timed("backtrack outcome independent of worker count", run)


def check_max_level(class_id: int, expected: int) -> Callable[[], CheckResult]:
    def check() -> CheckResult:
        def run():
            rec, _ = search.run_case(class_id, search.CaseConfig(depth=None))
            ok = rec.max_level == expected and rec.outcome == search.EXHAUSTED
            return ok, f"seeds={len(rec.seeds)} max_level={rec.max_level} outcome={rec.outcome} nodes={rec.nodes}"
        return _timed(f"case {class_id} exhausted with max level {expected}", run)
    check.__name__ = f"check_max_level_{class_id}"
    return check


FAST_CHECKS += [check_rejection, check_case_pipeline(36), check_case_pipeline(29)]

LONG_CHECKS = [check_census, check_table2_rows, check_engine_agreement, check_worker_independence,
               check_max_level(29, 2), check_max_level(35, 3)]
