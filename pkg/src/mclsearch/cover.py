"""Exact cover instances and bundle enumeration through a point.

A bundle through ``p`` is 28 candidate lines pairwise meeting only in ``p``;
equivalently an exact cover of ``p``'s 112 neighbours by the 4-point
remainders of lines through ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from . import kernels
from .cliques import LineIndex

BUNDLE_SIZE = 28


@dataclass
class CoverInstance:
    """Columns ``0..ncols-1``; ``rows[i]`` lists the columns row i covers.

    ``labels[i]`` is what row i stands for (a global line index for bundle
    instances) and ``column_labels[c]`` the item column c stands for.
    """

    ncols: int
    rows: list[tuple[int, ...]]
    labels: list[int] | None = None
    column_labels: list[int] | None = None
    _solver: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for r in self.rows:
            if not r:
                raise ValueError("every row must be nonempty")
            if any(not 0 <= c < self.ncols for c in r):
                raise ValueError(f"row {r} references an unknown column")

    @property
    def solver(self):
        if self._solver is None:
            self._solver = kernels.ExactCover(self.ncols, self.rows)
        return self._solver

    def label(self, rows: Sequence[int]) -> tuple[int, ...]:
        if self.labels is None:
            return tuple(rows)
        return tuple(sorted(self.labels[r] for r in rows))

    def column_degrees(self) -> list[int]:
        deg = [0] * self.ncols
        for r in self.rows:
            for c in r:
                deg[c] += 1
        return deg

    def dump(self) -> str:
        """Plain-text dump: ``"cols rows"`` then one row of column ids per line."""
        out = [f"{self.ncols} {len(self.rows)}"]
        out += [" ".join(map(str, r)) for r in self.rows]
        return "\n".join(out) + "\n"

    @classmethod
    def load(cls, text: str) -> "CoverInstance":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        ncols, nrows = map(int, lines[0].split())
        rows = [tuple(map(int, ln.split())) for ln in lines[1:]]
        if len(rows) != nrows:
            raise ValueError(f"header says {nrows} rows, found {len(rows)}")
        return cls(ncols, rows)


@dataclass
class CoverResult:
    count: int
    nodes: int
    complete: bool

    def __int__(self):
        return self.count


def solve_exact_cover(inst: CoverInstance, visitor: Callable[[tuple[int, ...]], object] | None = None,
                      budget: int | None = None, first_row: int | None = None) -> CoverResult:
    """Count (and optionally stream) every exact cover.

    ``visitor`` receives the ascending row ids of each solution; returning
    ``False`` stops the enumeration.  ``budget`` caps search nodes, and an
    exhausted budget yields ``complete=False`` with a partial count.
    ``first_row`` restricts to covers containing that row of the root column.
    """
    s = inst.solver
    if first_row is not None and first_row not in s.root_rows():
        raise ValueError("first_row must be one of the root column's rows")
    if visitor is None:
        return CoverResult(*s.count_solutions(first_row=first_row, budget=budget))
    return CoverResult(*s.visit(visitor, first_row=first_row, budget=budget))


def collect_solutions(inst: CoverInstance, first_row: int | None = None,
                      budget: int | None = None, width: int | None = None):
    """All solutions as a 2-D array of ascending row ids (uniform width)."""
    s = inst.solver
    flat, offs, complete = s.collect(first_row=first_row, budget=budget)
    n = len(offs) - 1
    if n == 0:
        return np.zeros((0, width or 0), dtype=np.int32), complete
    w = int(offs[1] - offs[0])
    if width is not None and w != width or not np.all(np.diff(offs) == w):
        raise ValueError("solutions do not have uniform width")
    return flat.reshape(n, w), complete


def partition_rows(inst: CoverInstance) -> list[int]:
    """Rows of the first branching column; forcing each gives disjoint subproblems."""
    return list(inst.solver.root_rows())


@dataclass
class BundleFrame:
    """Local numbering around an apex: lines through it and its neighbours."""

    idx: LineIndex
    apex: int
    lines: list[int]          # global ids of lines through apex, ascending
    neighbors: tuple[int, ...]
    local: dict[int, int]     # global line id -> local row id
    nbr_pos: dict[int, int]   # neighbour vertex -> column id

    @classmethod
    def at(cls, idx: LineIndex, p: int) -> "BundleFrame":
        lines = list(idx.by_vertex[p])
        nbrs = idx.graph.neighbors[p]
        return cls(idx, p, lines, nbrs, {l: i for i, l in enumerate(lines)},
                   {v: i for i, v in enumerate(nbrs)})

    def to_global(self, rows) -> tuple[int, ...]:
        return tuple(self.lines[r] for r in rows)


def bundle_instance(idx: LineIndex, p: int, feasible: Sequence[int] | None = None,
                    frame: BundleFrame | None = None) -> CoverInstance:
    """Cover instance whose solutions are the bundles through ``p``.

    Rows are the (optionally filtered) lines through ``p`` in ascending
    global order, each covering its four non-apex points.
    """
    frame = frame or BundleFrame.at(idx, p)
    allowed = frame.lines if feasible is None else sorted(feasible)
    for l in allowed:
        if l not in frame.local:
            raise ValueError(f"line {l} does not pass through {p}")
    rows = []
    for l in allowed:
        rows.append(tuple(sorted(frame.nbr_pos[v] for v in idx.lines[l] if v != p)))
    return CoverInstance(len(frame.neighbors), rows, labels=list(allowed),
                         column_labels=list(frame.neighbors))


def enumerate_bundles(idx: LineIndex, p: int, feasible: Sequence[int] | None = None,
                      visitor: Callable[[tuple[int, ...]], object] | None = None,
                      budget: int | None = None) -> CoverResult:
    """Count bundles through ``p``; ``visitor`` receives global line tuples."""
    inst = bundle_instance(idx, p, feasible)
    if visitor is None:
        return solve_exact_cover(inst, budget=budget)
    return solve_exact_cover(inst, lambda rows: visitor(inst.label(rows)), budget=budget)


def bundle_array(idx: LineIndex, p: int, feasible: Sequence[int] | None = None,
                 first_row: int | None = None, budget: int | None = None):
    """Bundles through ``p`` as an (N, 28) array of global line ids, plus completeness."""
    inst = bundle_instance(idx, p, feasible)
    sols, complete = collect_solutions(inst, first_row=first_row, budget=budget,
                                       width=BUNDLE_SIZE)
    labels = np.asarray(inst.labels, dtype=np.int32)
    return labels[sols], complete


def iter_bundles(idx: LineIndex, p: int, limit: int | None = None) -> Iterator[tuple[int, ...]]:
    """First ``limit`` bundles through ``p`` in solver order."""
    inst = bundle_instance(idx, p)
    flat, offs, _ = inst.solver.collect(limit=limit)
    for i in range(len(offs) - 1):
        yield inst.label(flat[offs[i]:offs[i + 1]].tolist())


def is_bundle(idx: LineIndex, p: int, lines: Sequence[int]) -> bool:
    if len(lines) != BUNDLE_SIZE or len(set(lines)) != BUNDLE_SIZE:
        return False
    covered = set()
    for l in lines:
        pts = idx.lines[l]
        if p not in pts:
            return False
        for v in pts:
            if v != p:
                if v in covered:
                    return False
                covered.add(v)
    return covered == set(idx.graph.neighbors[p])
