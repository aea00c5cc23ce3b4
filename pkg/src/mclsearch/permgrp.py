"""Stabilizer chains, orbits, set stabilizers and smallest set images.

All groups here are given by generator tuples on a domain ``range(n)``
(see :mod:`mclsearch.perm`).  Chains are deterministic: base points come
from a caller-supplied prefix, then the smallest point moved by the first
generator that fixes the current base.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import prod
from typing import Callable, Iterable, Iterator, Sequence

from .perm import Perm, identity, inv, is_identity, mul

DEFAULT_CEILING = 10**7


class OrbitTooLarge(RuntimeError):
    pass


class CeilingExceeded(RuntimeError):
    pass


@dataclass
class StabilizerChain:
    """Base and strong generating set with one Schreier transversal per level.

    ``transversals[i][x]`` maps ``base[i]`` to ``x`` and lies in the pointwise
    stabilizer of ``base[:i]``.
    """

    degree: int
    base: list[int]
    gens: list[list[Perm]]
    transversals: list[dict[int, Perm]] = field(repr=False)

    @property
    def order(self) -> int:
        return prod(len(t) for t in self.transversals)

    @property
    def strong_generators(self) -> list[Perm]:
        out = []
        seen = set()
        for level in self.gens:
            for g in level:
                if g not in seen:
                    seen.add(g)
                    out.append(g)
        return out

    def sift(self, g: Perm) -> tuple[Perm, int]:
        """Strip ``g`` through the chain; returns (residue, failing level)."""
        for i, b in enumerate(self.base):
            x = g[b]
            u = self.transversals[i].get(x)
            if u is None:
                return g, i
            g = mul(g, inv(u))
        return g, len(self.base)

    def __contains__(self, g: Perm) -> bool:
        if len(g) != self.degree:
            return False
        h, i = self.sift(g)
        return i == len(self.base) and is_identity(h)

    def level_generators(self, i: int) -> list[Perm]:
        """Generators of the pointwise stabilizer of ``base[:i]``."""
        if i >= len(self.gens):
            return []
        return list(self.gens[i])

    def orbit_of_base(self, i: int) -> list[int]:
        return sorted(self.transversals[i])


def _orbit_transversal(b: int, gens: Sequence[Perm], n: int) -> dict[int, Perm]:
    trans = {b: identity(n)}
    queue = deque([b])
    while queue:
        x = queue.popleft()
        u = trans[x]
        for g in gens:
            y = g[x]
            if y not in trans:
                trans[y] = mul(u, g)
                queue.append(y)
    return trans


def _moved_point(g: Perm) -> int:
    for i, x in enumerate(g):
        if i != x:
            return i
    raise ValueError("identity moves no point")


def schreier_sims(gens: Iterable[Perm], degree: int | None = None,
                  base: Sequence[int] = ()) -> StabilizerChain:
    """Deterministic incremental Schreier-Sims.

    ``base`` is an optional prefix that the resulting base starts with;
    redundant prefix points simply get trivial transversals.
    """
    gens = [g for g in gens if not is_identity(g)]
    if degree is None:
        if not gens:
            raise ValueError("degree required for an empty generator list")
        degree = len(gens[0])
    base = list(base)
    for g in gens:
        if all(g[b] == b for b in base):
            base.append(_moved_point(g))
    # strong generators distributed by level
    dist = [[g for g in gens if all(g[b] == b for b in base[:i])] for i in range(len(base))]
    trans = [_orbit_transversal(base[i], dist[i], degree) for i in range(len(base))]
    chain = StabilizerChain(degree, base, dist, trans)

    i = len(base) - 1
    while i >= 0:
        restart = False
        level_trans = chain.transversals[i]
        for beta in list(level_trans):
            u_beta = level_trans[beta]
            for s in chain.gens[i]:
                gamma = s[beta]
                sg = mul(mul(u_beta, s), inv(level_trans[gamma]))
                if is_identity(sg):
                    continue
                h, j = chain.sift(sg)
                if j == len(chain.base) and is_identity(h):
                    continue
                if j == len(chain.base):
                    chain.base.append(_moved_point(h))
                    chain.gens.append([])
                    chain.transversals.append({chain.base[-1]: identity(degree)})
                for lvl in range(i + 1, j + 1):
                    chain.gens[lvl].append(h)
                    chain.transversals[lvl] = _orbit_transversal(
                        chain.base[lvl], chain.gens[lvl], degree)
                i = j
                restart = True
                break
            if restart:
                break
        if not restart:
            i -= 1
    return chain


def trivial_chain(degree: int) -> StabilizerChain:
    return StabilizerChain(degree, [], [], [])


def point_stabilizer(chain: StabilizerChain, p: int) -> StabilizerChain:
    """Chain of the stabilizer of ``p`` (base re-rooted at ``p``)."""
    gens = chain.strong_generators
    if not gens:
        return trivial_chain(chain.degree)
    rooted = schreier_sims(gens, chain.degree, base=[p])
    return schreier_sims(rooted.level_generators(1), chain.degree)


def stabilizer_chain_with_base(chain: StabilizerChain, prefix: Sequence[int]) -> StabilizerChain:
    gens = chain.strong_generators
    if not gens:
        return StabilizerChain(chain.degree, list(prefix), [[] for _ in prefix],
                               [{b: identity(chain.degree)} for b in prefix])
    return schreier_sims(gens, chain.degree, base=prefix)


def orbit(gens: Sequence[Perm], seed, action: str = "points", cap: int | None = None,
          witnesses: bool = False):
    """Orbit of a point (``action="points"``) or sorted set (``"sets"``).

    Returns the list of orbit members in discovery order, or a dict
    member -> group element mapping the seed to it when ``witnesses``.
    """
    if action == "points":
        def act(x, g):
            return g[x]
    elif action == "sets":
        seed = tuple(sorted(seed))

        def act(x, g):
            return tuple(sorted(g[y] for y in x))
    else:
        raise ValueError(f"unknown action {action!r}")
    if witnesses:
        n = len(gens[0]) if gens else 0
        found = {seed: identity(n) if n else ()}
    else:
        found = {seed: None}
    queue = deque([seed])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = act(x, g)
            if y not in found:
                found[y] = mul(found[x], g) if witnesses else None
                if cap is not None and len(found) > cap:
                    raise OrbitTooLarge(f"orbit exceeds cap {cap}")
                queue.append(y)
    return found if witnesses else list(found)


def point_orbits(gens: Sequence[Perm], points: Iterable[int]) -> list[list[int]]:
    """Partition ``points`` (assumed a union of orbits) into sorted orbits."""
    remaining = set(points)
    out = []
    for x in sorted(remaining):
        if x not in remaining:
            continue
        orb = sorted(orbit(gens, x))
        remaining.difference_update(orb)
        out.append(orb)
    return out


def elements_iter(chain: StabilizerChain, ceiling: int = DEFAULT_CEILING) -> Iterator[Perm]:
    """Every group element exactly once, as products of transversal elements."""
    if chain.order > ceiling:
        raise CeilingExceeded(f"group order {chain.order} exceeds ceiling {ceiling}")
    levels = [list(t.values()) for t in chain.transversals]

    # g = u_{m-1} ... u_1 u_0 with the deepest factor applied first
    def rec(k: int, prefix: Perm):
        if k == len(levels):
            yield prefix
            return
        for u in levels[k]:
            yield from rec(k + 1, mul(u, prefix))

    yield from rec(0, identity(chain.degree))


def _set_stabilizer_search(chain: StabilizerChain, s: Sequence[int],
                           visit: Callable[[Perm], None]) -> None:
    """Visit every element fixing ``s`` setwise.

    Element iteration over a chain whose base starts with the points of
    ``s``; a branch is cut as soon as a base point's image leaves (or enters)
    ``s`` in the wrong way.
    """
    sset = frozenset(s)
    c = stabilizer_chain_with_base(chain, sorted(sset))
    m = len(c.base)
    levels = [list(c.transversals[i].items()) for i in range(m)]
    inside = [b in sset for b in c.base]
    n = c.degree

    def rec(k: int, prefix: Perm):
        # prefix = t_{k-1} ... t_0 applied as "t_k first" later: g = t_{m-1}...t_0
        if k == m:
            if all(prefix[x] in sset for x in sset):
                visit(prefix)
            return
        want = inside[k]
        for x, u in levels[k]:
            if (prefix[x] in sset) != want:
                continue
            rec(k + 1, mul(u, prefix))

    rec(0, identity(n))


def set_stabilizer_elements(chain: StabilizerChain, s: Sequence[int],
                            ceiling: int = DEFAULT_CEILING) -> list[Perm]:
    if chain.order > ceiling:
        raise CeilingExceeded(f"group order {chain.order} exceeds ceiling {ceiling}")
    out: list[Perm] = []
    _set_stabilizer_search(chain, s, out.append)
    return out


def set_stabilizer_order(chain: StabilizerChain, s: Sequence[int],
                         ceiling: int = DEFAULT_CEILING) -> int:
    """Exact order of the setwise stabilizer of ``s`` in the chain's group."""
    return len(set_stabilizer_elements(chain, s, ceiling))


def set_stabilizer_order_bruteforce(chain: StabilizerChain, s: Sequence[int],
                                    ceiling: int = DEFAULT_CEILING) -> int:
    sset = frozenset(s)
    return sum(1 for g in elements_iter(chain, ceiling) if all(g[x] in sset for x in sset))


def minimal_image(chain: StabilizerChain, s: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically smallest sorted image of the set ``s``.

    Builds the image one point at a time.  Each search node is a set image
    reachable from ``s``; the remaining freedom after fixing the first k image
    points is their pointwise stabilizer ``H``, so the next image point is the
    least orbit-minimum (under ``H``) among the node's unplaced points.
    """
    s = tuple(sorted(set(s)))
    gens = chain.strong_generators
    n = chain.degree
    nodes = {s}
    prefix: list[int] = []
    hgens = gens
    for _ in range(len(s)):
        if not hgens:
            best = min(nodes)
            return best
        orbit_min: dict[int, int] = {}
        witness: dict[int, Perm] = {}
        # orbit minima and transversal back to the minimum for every point
        for x in range(n):
            if x in orbit_min:
                continue
            trans = _orbit_transversal(x, hgens, n)
            lo = min(trans)
            u_lo = trans[lo]
            for y, uy in trans.items():
                orbit_min[y] = lo
                witness[y] = mul(inv(uy), u_lo)
        placed = set(prefix)
        m = min(orbit_min[x] for t in nodes for x in t if x not in placed)
        new_nodes = set()
        for t in nodes:
            for x in t:
                if x in placed or orbit_min[x] != m:
                    continue
                w = witness[x]
                new_nodes.add(tuple(sorted(w[y] for y in t)))
        nodes = new_nodes
        prefix.append(m)
        rooted = schreier_sims(hgens, n, base=[m])
        hgens = rooted.level_generators(1)
    return min(nodes)


def minimal_image_bruteforce(gens: Sequence[Perm], s: Sequence[int],
                             cap: int = 10**5) -> tuple[int, ...]:
    return min(orbit(gens, tuple(sorted(s)), "sets", cap=cap))
