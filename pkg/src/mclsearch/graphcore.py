"""The fixed McLaughlin graph: construction from generators and basic queries."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

from .perm import Perm, parse_cycles

N_POINTS = 275
SEED_EDGE = (1, 2)


class EdgeCapExceeded(RuntimeError):
    pass


class NotStronglyRegular(ValueError):
    pass


@dataclass(frozen=True)
class SrgParams:
    v: int
    k: int
    lam: int
    mu: int

    def __post_init__(self):
        if self.k * (self.k - self.lam - 1) != (self.v - self.k - 1) * self.mu:
            raise ValueError(f"inconsistent SRG parameters {tuple(self)}")

    def __iter__(self):
        return iter((self.v, self.k, self.lam, self.mu))

    def global_parameters(self) -> list[list[int]]:
        """Intersection array in GRAPE's ``GlobalParameters`` layout."""
        v, k, lam, mu = self
        return [[0, 0, k], [1, lam, k - lam - 1], [mu, k - mu, 0]]


def pseudogeometric_params(s: int, t: int, alpha: int) -> SrgParams:
    """SRG parameters of the point graph of a partial geometry pg(s,t,alpha)."""
    if not (s >= 1 and t >= 1 and 1 <= alpha <= min(s + 1, t + 1)):
        raise ValueError("need s,t >= 1 and 1 <= alpha <= min(s+1, t+1)")
    v, rem = divmod((s + 1) * (s * t + alpha), alpha)
    if rem:
        raise ValueError("vertex count is not an integer")
    return SrgParams(v, s * (t + 1), s - 1 + t * (alpha - 1), (t + 1) * alpha)


class Graph:
    """Simple undirected graph on vertices ``1..n``.

    ``rows[v]`` is an int bitmask with bit ``w`` set iff ``v ~ w``; it is the
    canonical form used for intersection counting.  ``neighbors[v]`` is the
    sorted tuple of the same vertices.  Index 0 of both is an empty sentinel.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        self.n = n
        rows = [0] * (n + 1)
        for a, b in edges:
            if a == b:
                raise ValueError("loops are not allowed")
            if not (1 <= a <= n and 1 <= b <= n):
                raise ValueError(f"edge {(a, b)} out of range")
            rows[a] |= 1 << b
            rows[b] |= 1 << a
        self.rows = rows
        self.neighbors = [tuple(_bits(r)) for r in rows]

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def adjacent(self, a: int, b: int) -> bool:
        return bool(self.rows[a] >> b & 1)

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a in self.vertices for b in self.neighbors[a] if a < b]

    @property
    def n_edges(self) -> int:
        return sum(len(x) for x in self.neighbors) // 2

    def is_clique(self, s: Sequence[int]) -> bool:
        return all(self.adjacent(a, b) for i, a in enumerate(s) for b in s[i + 1:])

    def common_count(self, a: int, b: int) -> int:
        return (self.rows[a] & self.rows[b]).bit_count()

    def to_text(self) -> str:
        edges = self.edges()
        return f"{self.n} {len(edges)}\n" + "".join(f"{a} {b}\n" for a, b in edges)

    @classmethod
    def from_text(cls, text: str) -> "Graph":
        lines = text.split("\n")
        n, e = map(int, lines[0].split())
        edges = [tuple(map(int, ln.split())) for ln in lines[1:] if ln.strip()]
        if len(edges) != e:
            raise ValueError(f"header says {e} edges, found {len(edges)}")
        return cls(n, edges)

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.rows == other.rows

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.n_edges})"


def _bits(x: int) -> Iterable[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def bits_to_list(x: int) -> list[int]:
    return list(_bits(x))


def parse_generators(text: str, n: int = N_POINTS) -> list[Perm]:
    return parse_cycles(text, n)


def fixture_generator_text() -> str:
    return resources.files("mclsearch.data").joinpath("mclaughlin_generators.txt").read_text()


@lru_cache(maxsize=None)
def mclaughlin_generators() -> tuple[Perm, ...]:
    return tuple(parse_generators(fixture_generator_text()))


def build_graph(gens: Sequence[Perm], seed_edge: tuple[int, int] = SEED_EDGE,
                n: int | None = None, edge_cap: int = 10**6) -> Graph:
    """Graph whose edge set is the orbit of ``seed_edge`` under ``gens``."""
    if n is None:
        n = len(gens[0]) - 1
    a, b = seed_edge
    if a == b:
        raise ValueError("seed edge must be a 2-subset")
    start = (min(a, b), max(a, b))
    seen = {start}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        for g in gens:
            u, v = g[x], g[y]
            e = (u, v) if u < v else (v, u)
            if e not in seen:
                seen.add(e)
                if len(seen) > edge_cap:
                    raise EdgeCapExceeded(f"edge orbit exceeds {edge_cap}")
                queue.append(e)
    return Graph(n, sorted(seen))


@lru_cache(maxsize=None)
def mclaughlin_graph() -> Graph:
    return build_graph(mclaughlin_generators(), SEED_EDGE)


def srg_params(g: Graph) -> SrgParams:
    degs = {g.degree(v) for v in g.vertices}
    if len(degs) != 1:
        raise NotStronglyRegular(f"graph is not regular: degrees {sorted(degs)}")
    k = degs.pop()
    lam, mu = set(), set()
    for a in g.vertices:
        ra = g.rows[a]
        for b in range(a + 1, g.n + 1):
            c = (ra & g.rows[b]).bit_count()
            (lam if ra >> b & 1 else mu).add(c)
    if len(lam) > 1 or len(mu) > 1:
        raise NotStronglyRegular(f"common-neighbor counts vary: lambda {lam}, mu {mu}")
    return SrgParams(g.n, k, lam.pop() if lam else 0, mu.pop() if mu else 0)


def common_neighbors(g: Graph, p: int, q: int) -> tuple[int, ...]:
    if p == q:
        raise ValueError("common_neighbors needs two distinct vertices")
    return tuple(_bits(g.rows[p] & g.rows[q]))


def non_neighbors(g: Graph, p: int) -> tuple[int, ...]:
    """Vertices other than ``p`` not adjacent to ``p``."""
    full = ((1 << (g.n + 1)) - 2)
    return tuple(_bits(full & ~g.rows[p] & ~(1 << p)))


def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """Subgraph on ``s`` relabelled ``1..|s|`` in sorted order; returns (graph, old->new)."""
    verts = sorted(set(s))
    relabel = {v: i + 1 for i, v in enumerate(verts)}
    edges = [(relabel[a], relabel[b]) for a in verts for b in g.neighbors[a]
             if b in relabel and a < b]
    return Graph(len(verts), edges), relabel
