"""Staged search driver: second point, compatible second bundles, symmetry
reduction, case order, cancellation, point-set selection and the backtrack.
"""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import bundles as bmod
from . import compat, kernels, permgrp
from .cliques import LineIndex, mclaughlin_lines
from .cover import BundleFrame, bundle_array, bundle_instance, solve_exact_cover
from .graphcore import Graph, mclaughlin_generators, non_neighbors
from .perm import Perm

log = logging.getLogger(__name__)

DEFAULT_N = 9
DEFAULT_U = 100_000
MANUAL_EARLY = (36,)


class AuditError(AssertionError):
    pass


class NoPointSet(ValueError):
    pass


class CapHit(Exception):
    pass


# --- shared groups ---

@lru_cache(maxsize=None)
def group_chain() -> permgrp.StabilizerChain:
    return permgrp.schreier_sims(mclaughlin_generators())


@lru_cache(maxsize=None)
def apex_group(p: int = 1) -> permgrp.StabilizerChain:
    return permgrp.point_stabilizer(group_chain(), p)


def representative(class_id: int) -> tuple[int, ...]:
    return bmod.representatives()[class_id]


def stabilizer_elements(idx: LineIndex, bundle: Sequence[int], p1: int = 1) -> list[Perm]:
    return bmod.bundle_stabilizer(idx, apex_group(p1), bundle, p1)


# --- second point ---

def count_compatible(idx: LineIndex, fixed: Sequence[int], p: int) -> int:
    """Bundles through ``p`` compatible with every line in ``fixed``."""
    inst = bundle_instance(idx, p, compat.compatible_lines_through(idx, p, fixed))
    res = solve_exact_cover(inst)
    return res.count


def point_orbits_under(elements: Sequence[Perm], points: Iterable[int]) -> list[list[int]]:
    """Orbits of ``points`` under a group given by its full element list."""
    seen: set[int] = set()
    out = []
    for x in sorted(points):
        if x in seen:
            continue
        orb = sorted({g[x] for g in elements})
        seen.update(orb)
        out.append(orb)
    return out


@dataclass
class SecondPoint:
    p2: int
    l: int
    N: int
    stab_order: int
    candidates: list[tuple[int, int, int]]   # (orbit min, orbit length, N)

    @property
    def N1(self) -> Fraction:
        return Fraction(self.N * self.l, self.stab_order)


def choose_second_point(idx: LineIndex, bundle: Sequence[int], stab: Sequence[Perm],
                        p1: int = 1, only: Iterable[int] | None = None,
                        counts: Mapping[int, int] | None = None) -> SecondPoint:
    """Orbit representative (its least point) among non-neighbours of ``p1`` minimising N*l/|Stab|.

    ``only`` restricts the candidates to the orbits of the given points;
    ``counts`` supplies cached N values.  Ties go to the smaller point.
    """
    orbits = point_orbits_under(stab, non_neighbors(idx.graph, p1))
    if only is not None:
        wanted = set(only)
        orbits = [o for o in orbits if wanted & set(o)]
    cands = []
    for orb in orbits:
        r = orb[0]
        n = counts[r] if counts and r in counts else count_compatible(idx, bundle, r)
        cands.append((r, len(orb), n))
    best = min(cands, key=lambda c: (Fraction(c[2] * c[1], len(stab)), c[0]))
    return SecondPoint(best[0], best[1], best[2], len(stab), cands)


def enumerate_compatible_second_bundles(idx: LineIndex, bundle: Sequence[int], p2: int,
                                        p1: int = 1) -> np.ndarray:
    """All bundles through ``p2`` compatible with ``bundle``, as an (N, 28) array."""
    if idx.graph.adjacent(p1, p2):
        raise ValueError("second point must be nonadjacent to the first")
    arr, complete = bundle_array(idx, p2, compat.feasible_lines(idx, bundle, p1, p2))
    assert complete
    return arr


# --- symmetry reduction ---

@dataclass
class Reduction:
    reps: np.ndarray           # (N2, 28) lex-min representatives, global line ids
    stab_orders: list[int]     # |stab_K(rep)| per representative
    group_order: int
    total: int                 # N

    @property
    def N2(self) -> int:
        return len(self.reps)


def reduce_by_symmetry(idx: LineIndex, bundles: np.ndarray, K: Sequence[Perm], apex: int) -> Reduction:
    """One lex-min representative per K-orbit of the given bundle set.

    The set must be K-invariant; every orbit image is checked against it and
    the orbit-stabilizer audit sum |K|/|stab| = N is enforced.
    """
    frame = BundleFrame.at(idx, apex)
    lut = np.full(len(idx), -1, dtype=np.int64)
    lut[frame.lines] = np.arange(len(frame.lines))
    rows = np.sort(lut[np.asarray(bundles, dtype=np.int64)], axis=1).astype(np.uint16)
    if len(rows) and (rows.max() >= len(frame.lines) or (lut[bundles] < 0).any()):
        raise ValueError(f"bundle line not through {apex}")
    rows = np.ascontiguousarray(rows)
    keys = [r.tobytes() for r in rows]
    members = set(keys)
    if len(members) != len(keys):
        raise AuditError("duplicate bundles in input")
    kl = np.asarray(bmod.local_line_group(idx, K, apex), dtype=np.uint16)
    korder = len(kl)
    seen: set[bytes] = set()
    reps, stabs = [], []
    total = 0
    for i, key in enumerate(keys):
        if key in seen:
            continue
        imgs = np.sort(kl[:, rows[i]], axis=1)
        orbit = np.unique(imgs, axis=0)
        stab = int((imgs == rows[i]).all(axis=1).sum())
        if stab * len(orbit) != korder:
            raise AuditError(f"orbit {len(orbit)} * stabilizer {stab} != {korder}")
        for o in orbit:
            b = o.tobytes()
            if b not in members:
                raise AuditError("bundle set is not closed under the group")
            seen.add(b)
        total += korder // stab
        reps.append(orbit[0])
        stabs.append(stab)
    if total != len(keys):
        raise AuditError(f"orbit sizes sum to {total}, expected {len(keys)}")
    lines = np.asarray(frame.lines, dtype=np.int32)
    rep_arr = lines[np.asarray(reps, dtype=np.int64)] if reps else np.zeros((0, 28), np.int32)
    return Reduction(rep_arr, stabs, korder, total)


# --- case order and cancellation ---

def order_cases(h_values: Mapping[int, int], rejected: Iterable[int] = (),
                early: Sequence[int] = MANUAL_EARLY) -> list[int]:
    """Rejected classes first, then ``early`` overrides, then ascending H (ties: lower id)."""
    rej = sorted(rejected)
    head = [c for c in early if c in h_values and c not in rej]
    rest = sorted((c for c in h_values if c not in head and c not in rej),
                  key=lambda c: (h_values[c], c))
    return rej + head + rest


@dataclass(frozen=True)
class Table2Row:
    class_id: int
    stab: int
    p2: int
    N: int
    l: int
    N1: int
    N2: int
    N3: int
    H: int


@lru_cache(maxsize=None)
def table2() -> tuple[Table2Row, ...]:
    return tuple(Table2Row(*map(int, r)) for r in bmod._data("table2.txt"))


@lru_cache(maxsize=None)
def table3() -> dict[int, tuple[int, float, int]]:
    return {int(r[0]): (int(r[1]), float(r[2]), int(r[3])) for r in bmod._data("table3.txt")}


def rejected_classes() -> list[int]:
    return sorted(c.class_id for c in bmod.table1() if c.rejected)


def fixture_order() -> list[int]:
    return order_cases({r.class_id: r.H for r in table2()}, rejected_classes())


def cancelled_before(class_id: int, order: Sequence[int] | None = None) -> set[int]:
    order = list(order or fixture_order())
    return set(order[:order.index(class_id)])


def classify_bundles(idx: LineIndex, arr: np.ndarray, apex: int) -> np.ndarray:
    """Class ids of an (M, 28) array of bundles through ``apex``."""
    if len(arr) == 0:
        return np.zeros(0, dtype=np.int32)
    inv = bmod.apex_tables(idx, apex).invariants_global(arr)
    by_key = bmod._by_key()
    out = np.empty(len(arr), dtype=np.int32)
    for i, row in enumerate(inv):
        key = tuple(int(x) for x in row)
        if key not in by_key:
            raise bmod.UnknownClass(f"invariant {key} matches no class")
        out[i] = by_key[key].class_id
    return out


def apply_cancellation(idx: LineIndex, reps: np.ndarray, apex: int,
                       cancelled: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    """Drop representatives whose class is cancelled; returns (kept, their class ids)."""
    ids = classify_bundles(idx, reps, apex)
    keep = ~np.isin(ids, sorted(set(cancelled)))
    return reps[keep], ids[keep]


# --- point-set selection ---

def common_non_neighbors(g: Graph, p1: int, p2: int) -> list[int]:
    mask = ((1 << (g.n + 1)) - 2) & ~g.rows[p1] & ~g.rows[p2] & ~(1 << p1) & ~(1 << p2)
    return [v for v in range(1, g.n + 1) if mask >> v & 1]


def point_costs(idx: LineIndex, b1: Sequence[int], b2: Sequence[int], points: Iterable[int]) -> dict[int, int]:
    """B(p): bundles through p compatible with both fixed bundles."""
    fixed = list(b1) + list(b2)
    return {p: count_compatible(idx, fixed, p) for p in points}


def count_independent_subsets(g: Graph, points: Sequence[int], size: int) -> int:
    pts = list(points)
    if len(pts) > 128:
        raise ValueError("at most 128 points")
    pos = {v: i for i, v in enumerate(pts)}
    adj = np.zeros((len(pts), 2), dtype=np.uint64)
    for i, v in enumerate(pts):
        m = 0
        for w in g.neighbors[v]:
            if w in pos:
                m |= 1 << pos[w]
        adj[i, 0] = m & 0xFFFFFFFFFFFFFFFF
        adj[i, 1] = m >> 64
    return int(kernels.count_independent_sets(adj, len(pts), size))


def select_point_set(g: Graph, costs: Mapping[int, int], n: int = DEFAULT_N,
                     u: int = DEFAULT_U) -> tuple[int, ...]:
    """Independent n-set minimising the cost sum with every cost below ``u``.

    A branch-and-bound pass over the points in ascending cost finds the
    optimum; a second pass in ascending vertex order returns the
    lexicographically smallest set attaining it.
    """
    pts = sorted((p for p in costs if costs[p] < u), key=lambda p: (costs[p], p))
    if n <= 0:
        return ()
    rows = g.rows
    after = [0] * (len(pts) + 1)
    for j in range(len(pts) - 1, -1, -1):
        after[j] = after[j + 1] | (1 << pts[j])
    best = [None]

    def lower(allowed: int, k: int) -> int | None:
        # sum of the k cheapest points still allowed
        tot = got = 0
        for p in pts:
            if got == k:
                break
            if allowed >> p & 1:
                tot += costs[p]
                got += 1
        return tot if got == k else None

    def opt(j0: int, allowed: int, k: int, partial: int):
        if k == n:
            if best[0] is None or partial < best[0]:
                best[0] = partial
            return
        for j in range(j0, len(pts)):
            p = pts[j]
            if not allowed >> p & 1:
                continue
            if best[0] is not None:
                # later points cost at least as much, so a failed loose bound ends the loop
                loose = lower(allowed & after[j + 1], n - k - 1)
                if loose is None or partial + costs[p] + loose >= best[0]:
                    break
            rest = allowed & ~rows[p] & after[j + 1]
            lb = lower(rest, n - k - 1)
            if lb is None or (best[0] is not None and partial + costs[p] + lb >= best[0]):
                continue
            opt(j + 1, rest, k + 1, partial + costs[p])

    full = 0
    for p in pts:
        full |= 1 << p
    opt(0, full, 0, 0)
    if best[0] is None:
        raise NoPointSet(f"no independent {n}-set with all costs below {u}")
    target = best[0]
    by_id = sorted(pts)
    found: list[tuple[int, ...]] = []

    def lex(i: int, allowed: int, chosen: list[int], partial: int) -> bool:
        k = len(chosen)
        if k == n:
            if partial == target:
                found.append(tuple(chosen))
                return True
            return False
        for j in range(i, len(by_id)):
            p = by_id[j]
            if not allowed >> p & 1:
                continue
            rest = allowed & ~rows[p] & ~(1 << p) & ~((1 << (p + 1)) - 1)
            lb = lower(rest, n - k - 1)
            if lb is None or partial + costs[p] + lb > target:
                continue
            chosen.append(p)
            if lex(j + 1, rest, chosen, partial + costs[p]):
                return True
            chosen.pop()
        return False

    lex(0, full, [], 0)
    return found[0]


# --- backtrack ---

@dataclass
class SeedProblem:
    """Candidate bundles and pairwise fingerprints for one seed and point set."""

    points: tuple[int, ...]
    arenas: dict[int, np.ndarray]                    # point -> (M, 28) global line ids
    fps: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)  # (p, q) -> (M_p, 5)


TRANSPORT_LIMIT = 1_000_000


def _lex_sorted(arr: np.ndarray) -> np.ndarray:
    if len(arr) == 0:
        return np.zeros((0, 28), dtype=np.int32)
    order = np.lexsort(arr.T[::-1])
    return np.ascontiguousarray(arr[order], dtype=np.int32)


@lru_cache(maxsize=4)
def _surviving_orbits(idx: LineIndex, classes: tuple[int, ...]) -> np.ndarray:
    """All bundles at point 1 in the given classes, as ascending global line ids."""
    U = apex_group(1)
    reps = bmod.representatives()
    frame = BundleFrame.at(idx, 1)
    lines = np.asarray(frame.lines, dtype=np.int32)
    parts = [lines[bmod.class_orbit_local(idx, U, reps[c], bmod.class_by_id(c).orbit_size)]
             for c in classes]
    return np.concatenate(parts) if parts else np.zeros((0, 28), dtype=np.int32)


def candidate_bundles(idx: LineIndex, p: int, fixed: Sequence[int], cancelled: Iterable[int] = (),
                      method: str = "auto") -> np.ndarray:
    """Bundles through ``p`` compatible with ``fixed`` whose class is not cancelled.

    Rows come back in lexicographic order.  ``"enumerate"`` runs the exact
    cover and classifies every solution; ``"transport"`` moves the orbits of
    the surviving classes from point 1 to ``p`` and keeps the compatible ones.
    ``"auto"`` picks transport when those orbits are small.
    """
    cancelled = set(cancelled)
    ok_lines = compat.compatible_lines_through(idx, p, fixed)
    alive = tuple(c.class_id for c in bmod.table1() if not c.rejected and c.class_id not in cancelled)
    if method == "auto":
        small = cancelled and sum(bmod.class_by_id(c).orbit_size for c in alive) <= TRANSPORT_LIMIT
        method = "transport" if small else "enumerate"
    if method == "enumerate":
        arr, complete = bundle_array(idx, p, ok_lines)
        if not complete:
            raise AuditError("bundle enumeration stopped early")
        if cancelled and len(arr):
            arr = arr[~np.isin(classify_bundles(idx, arr, p), sorted(cancelled))]
        return _lex_sorted(arr)
    if method != "transport":
        raise ValueError(f"unknown method {method!r}")
    orb = _surviving_orbits(idx, alive)
    t = group_chain().transversals[0][p]
    lp = np.asarray(idx.line_perm(t), dtype=np.int32)
    good = np.zeros(len(idx), dtype=bool)
    good[ok_lines] = True
    moved = lp[orb]
    keep = good[moved].all(axis=1)
    return _lex_sorted(np.sort(moved[keep], axis=1))


def build_problem(idx: LineIndex, b1: Sequence[int], b2: Sequence[int], points: Sequence[int],
                  cancelled: Iterable[int] = (), with_fingerprints: bool = True,
                  method: str = "auto") -> SeedProblem:
    fixed = list(b1) + list(b2)
    cancelled = set(cancelled)
    arenas = {p: candidate_bundles(idx, p, fixed, cancelled, method) for p in points}
    prob = SeedProblem(tuple(points), arenas)
    if with_fingerprints:
        for p in points:
            for q in points:
                if p != q:
                    frame = _frame(idx, p, q)
                    prob.fps[(p, q)] = compat.fingerprint_words(idx, arenas[p], frame, p)
    return prob


_frames: dict = {}


def _frame(idx: LineIndex, p: int, q: int) -> compat.GewirtzFrame:
    key = (id(idx), min(p, q), max(p, q))
    if key not in _frames:
        _frames[key] = compat.gewirtz_frame(idx.graph, p, q)
    return _frames[key]


class FingerprintFilter:
    """Keep candidates at ``r`` whose fingerprint misses that of the bundle fixed at ``q``."""

    def __init__(self, prob: SeedProblem):
        self.prob = prob

    def __call__(self, r: int, cand: np.ndarray, q: int, c: int) -> np.ndarray:
        word = self.prob.fps[(q, r)][c]
        return kernels.filter_disjoint(self.prob.fps[(r, q)], cand, word)


class NaiveFilter:
    """Same filter through direct line-pair comparison."""

    def __init__(self, prob: SeedProblem, idx: LineIndex):
        self.prob = prob
        self.idx = idx

    def __call__(self, r: int, cand: np.ndarray, q: int, c: int) -> np.ndarray:
        if len(cand) == 0:
            return cand
        a = self.prob.arenas[r][cand]
        b = np.repeat(self.prob.arenas[q][c:c + 1], len(cand), axis=0)
        return cand[compat.naive_compatible_batch(self.idx, a, b)]


@dataclass
class SearchStats:
    nodes: int = 0
    max_level: int = 0       # points of the chosen set completed at the deepest node

    def merge(self, other: "SearchStats"):
        self.nodes += other.nodes
        self.max_level = max(self.max_level, other.max_level)


EXHAUSTED = "exhausted"
COMPLETED = "completed_geometry"
CAP_HIT = "cap_hit"
TRUNCATED = "truncated"

Prefix = tuple[tuple[int, int], ...]


def _mrv(open_cands: Mapping[int, np.ndarray]) -> int:
    return min(open_cands, key=lambda p: (len(open_cands[p]), p))


def initial_state(prob: SeedProblem) -> dict[int, np.ndarray]:
    return {p: np.arange(len(prob.arenas[p]), dtype=np.int32) for p in prob.points}


def _apply(filt, open_cands: Mapping[int, np.ndarray], q: int, c: int) -> dict[int, np.ndarray]:
    return {r: filt(r, arr, q, c) for r, arr in open_cands.items() if r != q}


def replay(filt, prob: SeedProblem, prefix: Prefix) -> dict[int, np.ndarray]:
    state = initial_state(prob)
    for q, c in prefix:
        if q not in state or c not in set(state[q].tolist()):
            raise ValueError(f"prefix step {(q, c)} is not a live choice")
        state = _apply(filt, state, q, c)
    return state


def _dfs(filt, state: dict[int, np.ndarray], depth: int, stats: SearchStats,
         max_depth: int | None, node_cap: int | None, deadline: float | None,
         trace: list | None, prefix: list) -> str:
    stats.nodes += 1
    stats.max_level = max(stats.max_level, depth)
    if trace is not None:
        trace.append((tuple(prefix), {p: tuple(a.tolist()) for p, a in sorted(state.items())}))
    if not state:
        return COMPLETED
    if max_depth is not None and depth >= max_depth:
        return TRUNCATED
    if node_cap is not None and stats.nodes >= node_cap:
        raise CapHit
    if deadline is not None and stats.nodes % 64 == 0 and time.time() > deadline:
        raise CapHit
    q = _mrv(state)
    outcome = EXHAUSTED
    for c in state[q].tolist():
        prefix.append((q, c))
        res = _dfs(filt, _apply(filt, state, q, c), depth + 1, stats, max_depth,
                   node_cap, deadline, trace, prefix)
        prefix.pop()
        if res == COMPLETED:
            return res
        if res == TRUNCATED:
            outcome = TRUNCATED
    return outcome


def search_subtree(filt, prob: SeedProblem, prefix: Prefix = (), max_depth: int | None = None,
                   node_cap: int | None = None, deadline: float | None = None,
                   trace: list | None = None) -> tuple[str, SearchStats]:
    """Depth-first search below ``prefix``; depth and max_level count from the root."""
    stats = SearchStats(max_level=len(prefix))
    state = replay(filt, prob, prefix)
    try:
        res = _dfs(filt, state, len(prefix), stats, max_depth, node_cap, deadline, trace, list(prefix))
    except CapHit:
        res = CAP_HIT
    return res, stats


def task_inventory(filt, prob: SeedProblem, split_depth: int = 2) -> list[Prefix]:
    """Fixed prefixes splitting the tree at ``split_depth`` (shallower leaves kept as tasks).

    Independent of how many workers later run them.
    """
    out: list[Prefix] = []

    def rec(state, prefix):
        if len(prefix) == split_depth or not state:
            out.append(tuple(prefix))
            return
        q = _mrv(state)
        if len(state[q]) == 0:
            out.append(tuple(prefix))
            return
        for c in state[q].tolist():
            rec(_apply(filt, state, q, c), prefix + [(q, c)])

    rec(initial_state(prob), [])
    return out


@dataclass
class BacktrackResult:
    outcome: str
    stats: SearchStats
    tasks: int
    task_results: dict = field(default_factory=dict)   # prefix -> (outcome, nodes, max_level)


_worker_prob: SeedProblem | None = None


def _init_worker(prob: SeedProblem):
    global _worker_prob
    _worker_prob = prob


def _run_task(args):
    prefix, max_depth, node_cap, deadline = args
    if deadline is not None and time.time() > deadline:
        return prefix, CAP_HIT, 0, len(prefix)
    res, st = search_subtree(FingerprintFilter(_worker_prob), _worker_prob, prefix,
                             max_depth, node_cap, deadline)
    return prefix, res, st.nodes, st.max_level


def backtrack(prob: SeedProblem, max_depth: int | None = None, node_cap: int | None = None,
              seconds: float | None = None, workers: int = 1, split_depth: int = 2,
              done: Mapping[Prefix, tuple] | None = None,
              on_task: Callable[[Prefix, str, int, int], None] | None = None) -> BacktrackResult:
    """MRV backtrack with fingerprint filtering, split into deterministic tasks.

    ``node_cap`` applies per task, so capped outcomes do not depend on the
    worker count; ``seconds`` is one wall-clock budget for the whole call.  ``done`` holds results of
    tasks finished in an earlier run (from a checkpoint); ``on_task`` is
    called once per newly finished task.
    """
    filt = FingerprintFilter(prob)
    if max_depth is not None:
        split_depth = min(split_depth, max_depth)
    tasks = task_inventory(filt, prob, split_depth)
    done = dict(done or {})
    results = dict(done)
    todo = [t for t in tasks if t not in done]
    deadline = time.time() + seconds if seconds else None
    jobs = [(t, max_depth, node_cap, deadline) for t in todo]

    def record(prefix, res, nodes, level):
        results[prefix] = (res, nodes, level)
        if on_task:
            on_task(prefix, res, nodes, level)

    if workers <= 1 or len(jobs) <= 1:
        _init_worker(prob)
        for j in jobs:
            record(*_run_task(j))
            if results[j[0]][0] == COMPLETED:
                break
    else:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(prob,)) as ex:
            for out in ex.map(_run_task, jobs, chunksize=max(1, len(jobs) // (8 * workers))):
                record(*out)
    stats = SearchStats()
    outcomes = set()
    for t in tasks:
        if t in results:
            res, nodes, level = results[t]
            stats.nodes += nodes
            stats.max_level = max(stats.max_level, level)
            outcomes.add(res)
        else:
            outcomes.add(CAP_HIT)
    if COMPLETED in outcomes:
        outcome = COMPLETED
    elif CAP_HIT in outcomes:
        outcome = CAP_HIT
    elif TRUNCATED in outcomes:
        outcome = TRUNCATED
    else:
        outcome = EXHAUSTED
    return BacktrackResult(outcome, stats, len(tasks), results)


# --- checkpoints ---

class Checkpoint:
    """Append-only JSON lines of finished tasks keyed by (case, seed ordinal, prefix)."""

    def __init__(self, path: str | os.PathLike | None):
        self.path = path

    def load(self) -> dict[tuple[int, int], dict[Prefix, tuple]]:
        out: dict = {}
        if not self.path or not os.path.exists(self.path):
            return out
        with open(self.path) as fh:
            for ln in fh:
                if not ln.strip():
                    continue
                r = json.loads(ln)
                prefix = tuple(tuple(x) for x in r["prefix"])
                out.setdefault((r["case"], r["seed"]), {})[prefix] = (r["outcome"], r["nodes"], r["max_level"])
        return out

    def append(self, case: int, seed: int, prefix: Prefix, outcome: str, nodes: int, level: int):
        if not self.path or outcome == CAP_HIT:
            return
        rec = {"case": case, "seed": seed, "prefix": [list(s) for s in prefix],
               "outcome": outcome, "nodes": nodes, "max_level": level}
        with open(self.path, "a") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())


# --- whole case ---

@dataclass
class CaseConfig:
    depth: int | None = None       # backtrack depth limit; 0 = enumeration only, None = unlimited
    p2: int | None = None          # force the second point (its orbit is used)
    n: int = DEFAULT_N
    u: int = DEFAULT_U
    workers: int = 1
    node_budget: int | None = None
    seconds: float | None = None
    max_seeds: int | None = None
    split_depth: int = 2
    cancelled: frozenset | None = None
    checkpoint: str | None = None


@dataclass
class SeedOutcome:
    ordinal: int
    b2_class: int
    points: tuple[int, ...]
    outcome: str
    max_level: int
    nodes: int


@dataclass
class CaseRecord:
    class_id: int
    stab_order: int
    p2: int
    N: int
    l: int
    N2: int
    N3: int
    max_level: int | None = None
    nodes: int = 0
    wall: float = 0.0
    outcome: str = "enumerated"
    seeds: list[SeedOutcome] = field(default_factory=list)

    @property
    def N1(self) -> Fraction:
        return Fraction(self.N * self.l, self.stab_order)

    @property
    def H(self) -> int:
        return self.N2 * self.stab_order


def run_case(class_id: int, config: CaseConfig | None = None, idx: LineIndex | None = None,
             progress: Callable[[str], None] | None = None) -> tuple[CaseRecord, np.ndarray]:
    """Full pipeline for one class; returns the record and the surviving seeds (N3, 28)."""
    cfg = config or CaseConfig()
    idx = idx or mclaughlin_lines()
    say = progress or (lambda s: log.info(s))
    t0 = time.monotonic()
    p1 = 1
    b1 = representative(class_id)
    stab = stabilizer_elements(idx, b1, p1)
    say(f"class {class_id}: |Stab| = {len(stab)}")
    sp = choose_second_point(idx, b1, stab, p1, only=None if cfg.p2 is None else [cfg.p2])
    p2 = sp.p2
    say(f"p2 = {p2}, l = {sp.l}, N = {sp.N}")
    second = enumerate_compatible_second_bundles(idx, b1, p2, p1)
    K = [g for g in stab if g[p2] == p2]
    if len(K) * sp.l != len(stab):
        raise AuditError("|K| * l != |Stab|")
    red = reduce_by_symmetry(idx, second, K, p2)
    say(f"N2 = {red.N2}")
    cancelled = cfg.cancelled if cfg.cancelled is not None else cancelled_before(class_id)
    seeds, seed_cls = apply_cancellation(idx, red.reps, p2, cancelled)
    rec = CaseRecord(class_id, len(stab), p2, len(second), sp.l, red.N2, len(seeds))
    say(f"N3 = {len(seeds)}")
    if cfg.depth == 0:
        rec.wall = time.monotonic() - t0
        return rec, seeds
    ck = Checkpoint(cfg.checkpoint)
    finished = ck.load()
    # the case's own class stays available at the other points: it is not finished yet
    g = idx.graph
    S = common_non_neighbors(g, p1, p2)
    outcomes = []
    limit = len(seeds) if cfg.max_seeds is None else min(cfg.max_seeds, len(seeds))
    for i in range(limit):
        b2 = tuple(int(x) for x in seeds[i])
        costs = point_costs(idx, b1, b2, S)
        pts = select_point_set(g, costs, cfg.n, cfg.u)
        prob = build_problem(idx, b1, b2, pts, cancelled)
        res = backtrack(prob, cfg.depth, cfg.node_budget, cfg.seconds, cfg.workers, cfg.split_depth,
                        done=finished.get((class_id, i)),
                        on_task=lambda pre, o, n, lv, i=i: ck.append(class_id, i, pre, o, n, lv))
        so = SeedOutcome(i, int(seed_cls[i]), pts, res.outcome, res.stats.max_level, res.stats.nodes)
        outcomes.append(so)
        say(f"seed {i}: {so.outcome} level {so.max_level} nodes {so.nodes}")
    rec.seeds = outcomes
    if outcomes:
        rec.max_level = max(s.max_level for s in outcomes)
        rec.nodes = sum(s.nodes for s in outcomes)
        kinds = {s.outcome for s in outcomes}
        rec.outcome = next(k for k in (COMPLETED, CAP_HIT, TRUNCATED, EXHAUSTED) if k in kinds)
        if limit < len(seeds) and rec.outcome == EXHAUSTED:
            rec.outcome = CAP_HIT
    rec.wall = time.monotonic() - t0
    return rec, seeds
