"""Bundle invariants, classification into the 36 classes, and the census.

Two invariants separate the classes.  The grid count: 4-sets of bundle
lines met (away from the apex) by four further lines through the apex.
The refined one: let P be the 162 non-neighbours of the apex and L the
1512 lines off the apex meeting a bundle line in two points; ``t_i``
counts pairs of P covered by exactly i lines of L, and ``s`` is the least
number of "clean" lines (meeting two bundle lines once each and no
``C & P`` twice) through any one bundle line.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import kernels, permgrp
from .cliques import LineIndex
from .cover import BUNDLE_SIZE, BundleFrame, bundle_instance, collect_solutions, partition_rows
from .graphcore import Graph, non_neighbors
from .perm import Perm

log = logging.getLogger(__name__)

U_ORDER = 6531840
N_BUNDLES = 17729280
L_SIZE = 28 * 6 * 9
T_WEIGHT = 3 * L_SIZE


class UnknownClass(LookupError):
    pass


@dataclass(frozen=True)
class RefinedInvariant:
    s: int
    t: tuple[int, ...]

    def __post_init__(self):
        if len(self.t) != 10:
            raise ValueError("t must have 10 entries")


@dataclass(frozen=True)
class BundleClass:
    class_id: int
    old: int
    refined: RefinedInvariant
    stab_order: int

    @property
    def key(self) -> tuple[int, ...]:
        return (self.old, self.refined.s, *self.refined.t)

    @property
    def rejected(self) -> bool:
        return self.refined.t[9] > 0

    @property
    def orbit_size(self) -> int:
        return U_ORDER // self.stab_order


def _data(name: str) -> list[list[str]]:
    text = resources.files("mclsearch.data").joinpath(name).read_text()
    return [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


@lru_cache(maxsize=None)
def table1() -> tuple[BundleClass, ...]:
    out = []
    for f in _data("table1.txt"):
        v = list(map(int, f))
        out.append(BundleClass(v[0], v[1], RefinedInvariant(v[2], tuple(v[3:13])), v[13]))
    return tuple(out)


@lru_cache(maxsize=None)
def _by_key() -> dict[tuple[int, ...], BundleClass]:
    out = {}
    for c in table1():
        if c.key in out:
            raise ValueError(f"classes {out[c.key].class_id} and {c.class_id} share a key")
        out[c.key] = c
    return out


def class_by_id(class_id: int) -> BundleClass:
    return table1()[class_id - 1]


def classify(old: int, refined: RefinedInvariant) -> BundleClass:
    key = (old, refined.s, *refined.t)
    try:
        return _by_key()[key]
    except KeyError:
        raise UnknownClass(f"no bundle class has invariant {key}") from None


def classify_key(key: Sequence[int]) -> BundleClass:
    return classify(key[0], RefinedInvariant(key[1], tuple(key[2:12])))


def bundle_apex(idx: LineIndex, lines: Sequence[int]) -> int:
    common = set(idx.lines[lines[0]])
    for l in lines[1:]:
        common &= set(idx.lines[l])
    if len(common) != 1:
        raise ValueError("lines do not share exactly one point")
    return common.pop()


# --- definitional implementations (slow; the oracle for the kernel path) ---

def grid_invariant(lines: Sequence[int], idx: LineIndex, apex: int | None = None) -> int:
    """Number of 4-sets of bundle lines with four completing lines through the apex."""
    p = bundle_apex(idx, lines) if apex is None else apex
    bundle = set(lines)
    owner = {}
    for i, l in enumerate(lines):
        for v in idx.lines[l]:
            if v != p:
                owner[v] = i
    groups: dict[frozenset, list[int]] = {}
    for m in idx.by_vertex[p]:
        if m in bundle:
            continue
        f = frozenset(owner[v] for v in idx.lines[m] if v != p)
        if len(f) != 4:
            raise AssertionError("a line through the apex meets a bundle line twice")
        groups.setdefault(f, []).append(m)
    count = 0
    for f, ms in groups.items():
        if len(ms) > 4:
            raise AssertionError("more than four completing lines")
        if len(ms) == 4:
            for a, b in combinations(ms, 2):
                if set(idx.lines[a]) & set(idx.lines[b]) != {p}:
                    raise AssertionError("completing lines meet outside the apex")
            count += 1
    return count


def l_lines(lines: Sequence[int], idx: LineIndex, p: int) -> list[int]:
    """Lines not through ``p`` that meet some bundle line in exactly two points."""
    out = set()
    for l in lines:
        pts = set(idx.lines[l])
        for a, b in combinations(sorted(pts - {p}), 2):
            for m in idx.by_edge[(a, b)]:
                if p not in idx.lines[m] and len(pts & set(idx.lines[m])) == 2:
                    out.add(m)
    return sorted(out)


def refined_invariant(lines: Sequence[int], idx: LineIndex, g: Graph | None = None,
                      apex: int | None = None) -> RefinedInvariant:
    g = g or idx.graph
    p = bundle_apex(idx, lines) if apex is None else apex
    P = set(non_neighbors(g, p))
    L = l_lines(lines, idx, p)
    if len(L) != L_SIZE:
        raise AssertionError(f"|L| = {len(L)}, expected {L_SIZE}")
    cover: dict[tuple[int, int], int] = {}
    traces = []
    for m in L:
        tr = sorted(set(idx.lines[m]) & P)
        if len(tr) != 3:
            raise AssertionError(f"line {m} meets P in {len(tr)} points")
        traces.append(set(tr))
        for e in combinations(tr, 2):
            cover[e] = cover.get(e, 0) + 1
    t = [0] * 10
    for c in cover.values():
        t[c - 1] += 1
    bundle_sets = [set(idx.lines[l]) for l in lines]
    # L': lines off the apex meeting exactly two bundle lines, once each
    hits = [0] * len(lines)
    Lset = set(L)
    for m, pts in enumerate(idx.lines):
        if p in pts or m in Lset:
            continue
        meets = [i for i, bs in enumerate(bundle_sets) if bs & set(pts)]
        sizes = [len(bundle_sets[i] & set(pts)) for i in meets]
        if len(meets) != 2 or sizes != [1, 1]:
            continue
        mp = set(pts)
        if any(len(mp & tr) > 1 for tr in traces):
            continue
        for i in meets:
            hits[i] += 1
    return RefinedInvariant(min(hits), tuple(t))


def bundle_key(lines: Sequence[int], idx: LineIndex) -> tuple[int, ...]:
    p = bundle_apex(idx, lines)
    r = refined_invariant(lines, idx, apex=p)
    return (grid_invariant(lines, idx, apex=p), r.s, *r.t)


def classify_bundle(lines: Sequence[int], idx: LineIndex) -> BundleClass:
    return classify_key(bundle_key(lines, idx))


# --- table-driven batch path ---

class ApexTables:
    """Precomputed incidence tables around one apex for the invariant kernel."""

    def __init__(self, idx: LineIndex, p: int):
        self.idx = idx
        self.p = p
        self.frame = BundleFrame.at(idx, p)
        g = idx.graph
        P = non_neighbors(g, p)
        self.P = P
        ppos = {v: i for i, v in enumerate(P)}
        self.npairs = len(P) * len(P)
        nbr = self.frame.nbr_pos

        def pair_id(a, b):
            i, j = ppos[a], ppos[b]
            return i * len(P) + j if i < j else j * len(P) + i

        local = self.frame.local
        row_pairs = []
        row_nbrs = []
        for l in self.frame.lines:
            pts = [v for v in idx.lines[l] if v != p]
            row_nbrs.append([nbr[v] for v in pts])
            ids = []
            for a, b in combinations(pts, 2):
                for m in idx.by_edge[(a, b)]:
                    if m == l:
                        continue
                    tr = [v for v in idx.lines[m] if v in ppos]
                    ids += [pair_id(x, y) for x, y in combinations(tr, 2)]
            row_pairs.append(ids)
        m_line, m_nb, m_pairs = [], [], []
        rows_p = g.rows[p]
        for m, pts in enumerate(idx.lines):
            if p in pts:
                continue
            a, b = [v for v in pts if rows_p >> v & 1]
            tr = [v for v in pts if v in ppos]
            m_line.append(local[idx.by_triple[tuple(sorted((p, a, b)))]])
            m_nb.append([nbr[a], nbr[b]])
            m_pairs.append([pair_id(x, y) for x, y in combinations(tr, 2)])
        order = sorted(range(len(m_line)), key=m_line.__getitem__)
        m_line = [m_line[i] for i in order]
        m_nb = [m_nb[i] for i in order]
        m_pairs = [m_pairs[i] for i in order]
        self.row_pairs = np.ascontiguousarray(row_pairs, dtype=np.int32)
        self.row_nbrs = np.ascontiguousarray(row_nbrs, dtype=np.int32)
        self.m_line = np.ascontiguousarray(m_line, dtype=np.int32)
        self.m_nb = np.ascontiguousarray(m_nb, dtype=np.int32)
        self.m_pairs = np.ascontiguousarray(m_pairs, dtype=np.int32)

    def local_rows(self, bundles) -> np.ndarray:
        """Global line ids -> ascending local row ids, shape (N, 28)."""
        arr = np.asarray(bundles, dtype=np.int64)
        lut = np.full(len(self.idx), -1, dtype=np.int32)
        lut[self.frame.lines] = np.arange(len(self.frame.lines), dtype=np.int32)
        out = lut[arr]
        if (out < 0).any():
            raise ValueError(f"bundle line not through apex {self.p}")
        out.sort(axis=-1)
        return np.ascontiguousarray(out, dtype=np.int32)

    def invariants(self, local_rows) -> np.ndarray:
        """(N, 12) array of (old, s, t1..t10) for bundles given as local rows."""
        sols = np.ascontiguousarray(local_rows, dtype=np.int32)
        if sols.ndim == 1:
            sols = sols[None, :]
        return kernels.bundle_invariants(sols, self.row_pairs, self.row_nbrs, self.m_line,
                                         self.m_nb, self.m_pairs, self.npairs)

    def invariants_global(self, bundles) -> np.ndarray:
        return self.invariants(self.local_rows(bundles))


@lru_cache(maxsize=8)
def apex_tables(idx: LineIndex, p: int) -> ApexTables:
    return ApexTables(idx, p)


def local_line_group(idx: LineIndex, gens: Iterable[Perm], p: int) -> list[Perm]:
    """Point permutations fixing ``p``, as permutations of the local lines through ``p``."""
    frame = BundleFrame.at(idx, p)
    out = []
    for g in gens:
        if g[p] != p:
            raise ValueError("generator does not fix the apex")
        out.append(tuple(frame.local[idx.position[tuple(sorted(g[v] for v in idx.lines[l]))]]
                         for l in frame.lines))
    return out


def rejection_witness(lines: Sequence[int], idx: LineIndex) -> tuple[tuple[int, int], list[int]] | None:
    """A pair of apex non-neighbours all of whose 10 covering lines are in L.

    Returns ``((x, y), covering_lines)`` or None when no such pair exists.
    Each covering line meets some bundle line in exactly two points.
    """
    p = bundle_apex(idx, lines)
    L = set(l_lines(lines, idx, p))
    P = set(non_neighbors(idx.graph, p))
    counts: dict[tuple[int, int], int] = {}
    for m in L:
        tr = sorted(set(idx.lines[m]) & P)
        for e in combinations(tr, 2):
            counts[e] = counts.get(e, 0) + 1
    for e in sorted(counts):
        if counts[e] == 10:
            return e, list(idx.by_edge[e])
    return None


# --- census at one apex ---

@dataclass
class CensusEntry:
    key: tuple[int, ...]
    count: int
    rep: tuple[int, ...]        # lex-min bundle seen with this key (global line ids)


def _census_chunk(idx: LineIndex, p: int, first_row: int):
    """Tallies and lex-min bundle per invariant key over one root branch."""
    tables = apex_tables(idx, p)
    inst = bundle_instance(idx, p, frame=tables.frame)
    sols, complete = collect_solutions(inst, first_row=first_row, width=BUNDLE_SIZE)
    if not complete:
        raise RuntimeError("census chunk incomplete")
    inv = tables.invariants(sols)
    out: dict[tuple[int, ...], tuple[int, tuple[int, ...]]] = {}
    keys, inverse, counts = np.unique(inv, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    for k in range(len(keys)):
        members = sols[inverse == k]
        # local rows ascend with global ids, so row-wise lex order is global lex order
        order = np.lexsort(members.T[::-1])
        best = members[order[0]]
        out[tuple(int(x) for x in keys[k])] = (int(counts[k]),
                                               tuple(tables.frame.lines[r] for r in best))
    return len(sols), out


def _census_worker(args):
    p, first_row = args
    from .cliques import mclaughlin_lines
    return _census_chunk(mclaughlin_lines(), p, first_row)


def bundle_census(idx: LineIndex, p: int = 1, workers: int = 1,
                  progress=None) -> tuple[int, dict[tuple[int, ...], CensusEntry]]:
    """Enumerate all bundles through ``p``, bucketed by full invariant key."""
    inst = bundle_instance(idx, p)
    roots = partition_rows(inst)
    merged: dict[tuple[int, ...], CensusEntry] = {}
    total = 0

    def merge(res):
        nonlocal total
        n, part = res
        total += n
        for key, (cnt, rep) in part.items():
            e = merged.get(key)
            if e is None:
                merged[key] = CensusEntry(key, cnt, rep)
            else:
                e.count += cnt
                e.rep = min(e.rep, rep)

    t0 = time.time()
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as ex:
            for i, res in enumerate(ex.map(_census_worker, [(p, r) for r in roots])):
                merge(res)
                if progress:
                    progress(i + 1, len(roots), total, time.time() - t0)
    else:
        for i, r in enumerate(roots):
            merge(_census_chunk(idx, p, r))
            if progress:
                progress(i + 1, len(roots), total, time.time() - t0)
    return total, merged


@dataclass
class ClassRecord:
    cls: BundleClass
    orbit_size: int
    stab_order: int
    rep: tuple[int, ...]


def classify_all_bundles(idx: LineIndex, U: permgrp.StabilizerChain, p: int = 1,
                         workers: int = 1, verify_lexmin: bool = True,
                         progress=None) -> list[ClassRecord]:
    """Census plus orbit-stabilizer audit against ``U`` (the stabilizer of ``p``).

    Invariant buckets are taken as orbits; each bucket's size must equal
    ``|U| / |Stab(rep)|`` with the stabilizer computed independently, which
    certifies that no bucket merges two orbits.
    """
    total, census = bundle_census(idx, p, workers, progress)
    if total != sum(e.count for e in census.values()):
        raise AssertionError("census tally mismatch")
    local_gens = local_line_group(idx, U.strong_generators, p)
    frame = BundleFrame.at(idx, p)
    lchain = permgrp.schreier_sims(local_gens, len(frame.lines))
    if lchain.order != U.order:
        raise AssertionError("U does not act faithfully on the lines through p")
    out = []
    for key, e in sorted(census.items()):
        cls = classify_key(key)
        rep_local = [frame.local[l] for l in e.rep]
        stab = permgrp.set_stabilizer_order(lchain, rep_local)
        if stab * e.count != lchain.order:
            raise AssertionError(f"orbit-stabilizer audit failed for class {cls.class_id}: "
                                 f"{e.count} * {stab} != {lchain.order}")
        if verify_lexmin:
            mi = permgrp.minimal_image(lchain, rep_local)
            if tuple(mi) != tuple(sorted(rep_local)):
                raise AssertionError(f"class {cls.class_id} representative is not lex-min")
        out.append(ClassRecord(cls, e.count, stab, e.rep))
    out.sort(key=lambda r: r.cls.class_id)
    return out


# --- class table file ---

def format_class_table(records: Sequence[ClassRecord], checksum: str | None = None) -> str:
    out = [f"# lines-checksum {checksum}"] if checksum else []
    out.append("# class old s t1 t2 t3 t4 t5 t6 t7 t8 t9 t10 stab_order orbit_size rep(28 line ids)")
    for r in records:
        c = r.cls
        fields = [c.class_id, c.old, c.refined.s, *c.refined.t, r.stab_order, r.orbit_size, *r.rep]
        out.append(" ".join(map(str, fields)))
    return "\n".join(out) + "\n"


def parse_class_table(text: str) -> list[ClassRecord]:
    out = []
    for ln in text.splitlines():
        if not ln.strip() or ln.startswith("#"):
            continue
        v = list(map(int, ln.split()))
        cls = classify(v[1], RefinedInvariant(v[2], tuple(v[3:13])))
        if cls.class_id != v[0]:
            raise ValueError(f"row {v[0]} carries the invariant of class {cls.class_id}")
        if len(v) != 15 + BUNDLE_SIZE:
            raise ValueError(f"class row {v[0]} has {len(v)} fields")
        out.append(ClassRecord(cls, v[14], v[13], tuple(v[15:])))
    return out


def header_checksum(text: str) -> str | None:
    """The ``# lines-checksum`` value of a downstream file, if present."""
    for ln in text.splitlines():
        if ln.startswith("# lines-checksum "):
            return ln.split()[2]
    return None


def class_table_text() -> str:
    return resources.files("mclsearch.data").joinpath("classes.txt").read_text()


@lru_cache(maxsize=None)
def representatives() -> dict[int, tuple[int, ...]]:
    """Lex-min representative bundles through point 1, keyed by class id."""
    return {r.cls.class_id: r.rep for r in parse_class_table(class_table_text())}


def heuristic_compatibility() -> float:
    """Chance that two random 28-subsets of the 280 Gewirtz edges are disjoint."""
    from fractions import Fraction
    return float(Fraction(comb(252, 28), comb(280, 28)))


def bundle_stabilizer(idx: LineIndex, U: permgrp.StabilizerChain, lines: Sequence[int],
                      p: int | None = None) -> list[Perm]:
    """Elements of ``U`` (fixing the apex) that map the bundle to itself, as point permutations.

    The group is run on points and local lines side by side, so the setwise
    stabilizer of the bundle's lines comes back with its point action attached.
    """
    p = bundle_apex(idx, lines) if p is None else p
    frame = BundleFrame.at(idx, p)
    npts = idx.graph.n + 1
    gens = U.strong_generators
    local = local_line_group(idx, gens, p)
    joint = [tuple(g) + tuple(npts + x for x in lg) for g, lg in zip(gens, local)]
    chain = permgrp.schreier_sims(joint, npts + len(frame.lines))
    if chain.order != U.order:
        raise AssertionError("joint action is not faithful")
    target = [npts + frame.local[l] for l in lines]
    return [g[:npts] for g in permgrp.set_stabilizer_elements(chain, target)]


def class_orbit_local(idx: LineIndex, U: permgrp.StabilizerChain, rep: Sequence[int],
                      expected: int | None = None) -> np.ndarray:
    """The ``U``-orbit of a bundle through point 1 as sorted local row ids, shape (M, 28).

    Breadth-first over the generators acting on the local lines; ``expected``
    (the orbit size from the class table) is checked when given.
    """
    frame = BundleFrame.at(idx, 1)
    gens = np.asarray(local_line_group(idx, U.strong_generators, 1), dtype=np.int16)
    start = np.sort(np.asarray([frame.local[l] for l in rep], dtype=np.int16))[None, :]
    seen = {start[0].tobytes()}
    parts = [start]
    frontier = start
    while len(frontier):
        imgs = np.unique(np.sort(gens[:, frontier].reshape(-1, BUNDLE_SIZE), axis=1), axis=0)
        new = [r for r in imgs if r.tobytes() not in seen]
        seen.update(r.tobytes() for r in new)
        frontier = np.asarray(new, dtype=np.int16).reshape(-1, BUNDLE_SIZE)
        if len(frontier):
            parts.append(frontier)
    out = np.concatenate(parts)
    if expected is not None and len(out) != expected:
        raise AssertionError(f"orbit has {len(out)} bundles, expected {expected}")
    return out
