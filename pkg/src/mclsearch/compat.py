"""Compatibility of candidate lines and bundles, and the 280-bit fingerprint path.

Two bundles are compatible when no line of one meets a line of the other
in exactly two points.  For bundles through nonadjacent points ``p, p'``
every line through either apex meets their 56 common neighbours (which
span the Gewirtz graph) in one of its 280 edges, so compatibility reduces
to disjointness of two 28-edge sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

from . import kernels
from .cliques import LineIndex
from .graphcore import Graph, common_neighbors, induced_subgraph

N_WORDS = 5
N_BITS = 280
TOP_MASK = (1 << (N_BITS - 64 * (N_WORDS - 1))) - 1


class FrameMismatch(ValueError):
    pass


@lru_cache(maxsize=4)
def line_mask_array(idx: LineIndex) -> np.ndarray:
    """(n_lines, 5) uint64 point masks; bit v of the 320-bit row marks point v."""
    out = np.zeros((len(idx), N_WORDS), dtype=np.uint64)
    for i, m in enumerate(idx.masks):
        for w in range(N_WORDS):
            out[i, w] = (m >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    return out


def lines_compatible(a: Sequence[int], b: Sequence[int]) -> bool:
    return len(set(a) & set(b)) != 2


def bundles_compatible_naive(idx: LineIndex, b1: Sequence[int], b2: Sequence[int]) -> bool:
    """All 784 line pairs compared directly."""
    sets2 = [set(idx.lines[y]) for y in b2]
    for x in b1:
        s1 = set(idx.lines[x])
        for s2 in sets2:
            if len(s1 & s2) == 2:
                return False
    return True


def naive_compatible_batch(idx: LineIndex, a, b) -> np.ndarray:
    """Vectorised naive check over aligned rows of two (M, 28) bundle arrays."""
    a = np.ascontiguousarray(a, dtype=np.int32)
    b = np.ascontiguousarray(b, dtype=np.int32)
    return kernels.naive_compatible(line_mask_array(idx), a, b).astype(bool)


@dataclass(eq=False)
class GewirtzFrame:
    """Common neighbourhood of a nonadjacent pair with its edges numbered 0..279.

    Edges are sorted lexicographically by their endpoints relabelled
    ``1..56`` in ascending vertex order; bit k is the k-th edge.
    """

    pair: tuple[int, int]
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    edge_index: dict
    graph: Graph

    def __post_init__(self):
        self.vertex_set = frozenset(self.vertices)

    @property
    def subgraph(self) -> Graph:
        return induced_subgraph(self.graph, self.vertices)[0]

    def bit(self, a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        try:
            return self.edge_index[key]
        except KeyError:
            raise FrameMismatch(f"{key} is not an edge of the frame") from None


def gewirtz_frame(g: Graph, p: int, q: int) -> GewirtzFrame:
    if g.adjacent(p, q) or p == q:
        raise ValueError("frame points must be distinct and nonadjacent")
    verts = common_neighbors(g, p, q)
    sub, relabel = induced_subgraph(g, verts)
    back = {v: k for k, v in relabel.items()}
    edges = tuple((back[a], back[b]) for a, b in sub.edges())
    pair = (min(p, q), max(p, q))
    return GewirtzFrame(pair, verts, edges, {e: i for i, e in enumerate(edges)}, g)


@dataclass(frozen=True)
class Fingerprint:
    bits: int
    pair: tuple[int, int]
    apex: int

    def words(self) -> tuple[int, ...]:
        return tuple((self.bits >> (64 * w)) & 0xFFFFFFFFFFFFFFFF for w in range(N_WORDS))

    def hex(self) -> str:
        """Five 64-bit words, word 0 (bits 0..63) first, each as 16 hex digits."""
        return "".join(f"{w:016x}" for w in self.words())

    @classmethod
    def from_hex(cls, text: str, pair, apex) -> "Fingerprint":
        if len(text) != 16 * N_WORDS:
            raise ValueError("fingerprint hex must have 80 digits")
        bits = 0
        for w in range(N_WORDS):
            bits |= int(text[16 * w:16 * (w + 1)], 16) << (64 * w)
        if bits >> N_BITS:
            raise ValueError("bits above 280 must be zero")
        return cls(bits, tuple(pair), apex)

    def popcount(self) -> int:
        return self.bits.bit_count()


def line_edge_bit(idx: LineIndex, frame: GewirtzFrame, line: int) -> int:
    inter = [v for v in idx.lines[line] if v in frame.vertex_set]
    if len(inter) != 2:
        raise FrameMismatch(f"line {idx.lines[line]} meets the frame in {len(inter)} points")
    return frame.bit(*inter)


def fingerprint(idx: LineIndex, lines: Sequence[int], frame: GewirtzFrame, apex: int | None = None) -> Fingerprint:
    if apex is None:
        from .bundles import bundle_apex
        apex = bundle_apex(idx, lines)
    if apex not in frame.pair:
        raise FrameMismatch(f"apex {apex} is not a frame point")
    bits = 0
    for l in lines:
        b = 1 << line_edge_bit(idx, frame, l)
        if bits & b:
            raise FrameMismatch("two bundle lines share a frame edge")
        bits |= b
    return Fingerprint(bits, frame.pair, apex)


def fingerprints_disjoint(f1: Fingerprint, f2: Fingerprint) -> bool:
    if f1.pair != f2.pair:
        raise FrameMismatch("fingerprints belong to different frames")
    if f1.apex == f2.apex:
        raise FrameMismatch("fingerprints must come from opposite frame points")
    return (f1.bits & f2.bits) == 0


def edge_bit_table(idx: LineIndex, frame: GewirtzFrame, apex: int) -> dict[int, int]:
    """Frame edge bit of every line through ``apex``."""
    return {l: line_edge_bit(idx, frame, l) for l in idx.by_vertex[apex]}


def fingerprint_words(idx: LineIndex, bundles, frame: GewirtzFrame, apex: int) -> np.ndarray:
    """Fingerprints of an (N, 28) array of bundles through ``apex`` as (N, 5) uint64."""
    bundles = np.asarray(bundles, dtype=np.int64)
    table = edge_bit_table(idx, frame, apex)
    lut = np.full(len(idx), -1, dtype=np.int64)
    for l, b in table.items():
        lut[l] = b
    bits = lut[bundles]
    if (bits < 0).any():
        raise FrameMismatch(f"bundle line not through apex {apex}")
    out = np.zeros((len(bundles), N_WORDS), dtype=np.uint64)
    word = bits >> 6
    one = np.left_shift(np.uint64(1), (bits & 63).astype(np.uint64))
    for w in range(N_WORDS):
        out[:, w] = np.bitwise_or.reduce(np.where(word == w, one, np.uint64(0)), axis=1)
    if len(bundles) and not (np.bitwise_count(out).sum(axis=1) == bundles.shape[1]).all():
        raise FrameMismatch("fingerprint bits are not distinct")
    if (out[:, N_WORDS - 1] & ~np.uint64(TOP_MASK)).any():
        raise AssertionError("bits above 280 set")
    return out


def incompatible_with(idx: LineIndex, candidates: Sequence[int], fixed: Sequence[int]) -> np.ndarray:
    """Boolean mask over ``candidates``: True where the line meets some fixed line in 2 points."""
    masks = line_mask_array(idx)
    if len(fixed) == 0 or len(candidates) == 0:
        return np.zeros(len(candidates), dtype=bool)
    a = masks[np.asarray(candidates)][:, None, :]
    b = masks[np.asarray(fixed)][None, :, :]
    inter = np.bitwise_count(a & b).sum(axis=2)
    return (inter == 2).any(axis=1)


def compatible_lines_through(idx: LineIndex, p: int, fixed: Sequence[int]) -> list[int]:
    """Lines through ``p`` compatible with every line in ``fixed``."""
    cand = idx.by_vertex[p]
    bad = incompatible_with(idx, cand, fixed)
    return [l for l, b in zip(cand, bad) if not b]


class NoJointLine(ValueError):
    pass


def joint_line(idx: LineIndex, bundle: Sequence[int], p1: int, p2: int) -> int:
    """The bundle line through adjacent ``p1`` and ``p2``."""
    for l in bundle:
        if p2 in idx.lines[l]:
            return l
    raise NoJointLine(f"no bundle line through {p1} contains {p2}")


def feasible_lines(idx: LineIndex, bundle: Sequence[int], p1: int, p2: int) -> list[int]:
    """Lines through ``p2`` still free to join a bundle compatible with ``bundle`` at ``p1``.

    Nonadjacent points: every compatible line through ``p2`` (252 of them).
    Adjacent points: the joint line is forced into any compatible bundle, so
    it is left out and the remaining compatible lines are returned (243);
    get the joint line itself from :func:`joint_line`.
    """
    if p1 == p2:
        raise ValueError("points must differ")
    if not idx.graph.adjacent(p1, p2):
        return compatible_lines_through(idx, p2, bundle)
    ell = joint_line(idx, bundle, p1, p2)
    return [l for l in compatible_lines_through(idx, p2, bundle) if l != ell]


def heuristic_disjoint_probability() -> Fraction:
    """Probability that two random 28-subsets of 280 edges are disjoint."""
    return Fraction(comb(252, 28), comb(280, 28))
