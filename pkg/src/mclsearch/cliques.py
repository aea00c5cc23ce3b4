"""Candidate lines (maximal cliques) of the graph and their incidence index."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .graphcore import Graph, bits_to_list, mclaughlin_graph
from .perm import Perm


def maximal_cliques(g: Graph) -> list[tuple[int, ...]]:
    """All maximal cliques, each sorted, the list sorted lexicographically."""
    rows = g.rows
    out: list[tuple[int, ...]] = []

    def expand(r: list[int], p: int, x: int):
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        # pivot: vertex of p|x with most neighbours inside p
        px = p | x
        best, pivot = -1, 0
        while px:
            low = px & -px
            u = low.bit_length() - 1
            c = (rows[u] & p).bit_count()
            if c > best:
                best, pivot = c, u
            px ^= low
        cand = p & ~rows[pivot]
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            r.append(v)
            expand(r, p & rows[v], x & rows[v])
            r.pop()
            p &= ~low
            x |= low
            cand ^= low

    all_vertices = ((1 << (g.n + 1)) - 2)
    expand([], all_vertices, 0)
    out.sort()
    return out


@dataclass(eq=False)
class LineIndex:
    """Incidence index over the globally sorted candidate lines.

    Lines are referenced by position in ``lines`` (0-based).
    """

    graph: Graph
    lines: list[tuple[int, ...]]
    by_vertex: list[list[int]] = field(init=False, repr=False)
    by_edge: dict[tuple[int, int], list[int]] = field(init=False, repr=False)
    by_triple: dict[tuple[int, int, int], int] = field(init=False, repr=False)
    position: dict[tuple[int, ...], int] = field(init=False, repr=False)
    masks: list[int] = field(init=False, repr=False)

    def __post_init__(self):
        n = self.graph.n
        self.by_vertex = [[] for _ in range(n + 1)]
        self.by_edge = {}
        self.by_triple = {}
        self.position = {}
        self.masks = []
        for i, ln in enumerate(self.lines):
            self.position[ln] = i
            m = 0
            for v in ln:
                self.by_vertex[v].append(i)
                m |= 1 << v
            self.masks.append(m)
            for e in combinations(ln, 2):
                self.by_edge.setdefault(e, []).append(i)
            for t in combinations(ln, 3):
                if t in self.by_triple:
                    raise ValueError(f"triangle {t} lies in two candidate lines")
                self.by_triple[t] = i

    def __len__(self):
        return len(self.lines)

    def checksum(self) -> str:
        h = hashlib.sha256(lines_to_text(self.lines).encode())
        return h.hexdigest()[:16]

    def line_perm(self, g: Perm) -> Perm:
        """Action of a point permutation on line indices."""
        pos = self.position
        return tuple(pos[tuple(sorted(g[v] for v in ln))] for ln in self.lines)


def enumerate_candidate_lines(g: Graph) -> list[tuple[int, ...]]:
    return maximal_cliques(g)


def lines_through(idx: LineIndex, p: int) -> list[int]:
    return idx.by_vertex[p]


def lines_through_edge(idx: LineIndex, a: int, b: int) -> list[int]:
    return idx.by_edge.get((min(a, b), max(a, b)), [])


def unique_line_containing(idx: LineIndex, t: Sequence[int]) -> tuple[int, ...]:
    key = tuple(sorted(t))
    if len(key) != 3 or not idx.graph.is_clique(key):
        raise ValueError(f"{t} is not a triangle")
    return idx.lines[idx.by_triple[key]]


def two_point_count(idx: LineIndex, line: Sequence[int], q: int) -> int:
    if q in line:
        raise ValueError(f"point {q} lies on the line")
    row = idx.graph.rows[q]
    return sum(row >> v & 1 for v in line)


def lines_to_text(lines: Sequence[Sequence[int]]) -> str:
    return "".join(" ".join(map(str, ln)) + "\n" for ln in lines)


def lines_from_text(text: str) -> list[tuple[int, ...]]:
    return [tuple(map(int, ln.split())) for ln in text.splitlines() if ln.strip()]


@lru_cache(maxsize=None)
def mclaughlin_lines() -> LineIndex:
    g = mclaughlin_graph()
    return LineIndex(g, enumerate_candidate_lines(g))


def points_of(mask: int) -> list[int]:
    return bits_to_list(mask)
