"""Permutations as image tuples, plus cycle-notation and one-line I/O.

A permutation on a domain ``range(n)`` is a tuple ``g`` with ``g[x]`` the
image of ``x``.  Groups act on the right: ``x^(gh) = h[g[x]]``.

Point permutations of the graph use a domain of size ``275 + 1`` whose
slot 0 is a fixed sentinel, so every public vertex stays 1-based.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

Perm = tuple


def identity(n: int) -> Perm:
    return tuple(range(n))


def is_identity(g: Sequence[int]) -> bool:
    return all(i == x for i, x in enumerate(g))


def mul(g: Perm, h: Perm) -> Perm:
    """Product ``gh``: apply ``g`` first, then ``h``."""
    return tuple(map(h.__getitem__, g))


def inv(g: Perm) -> Perm:
    out = [0] * len(g)
    for i, x in enumerate(g):
        out[x] = i
    return tuple(out)


def power(g: Perm, e: int) -> Perm:
    if e < 0:
        g, e = inv(g), -e
    out = identity(len(g))
    while e:
        if e & 1:
            out = mul(out, g)
        g = mul(g, g)
        e >>= 1
    return out


def order(g: Perm) -> int:
    from math import lcm

    seen = bytearray(len(g))
    out = 1
    for i in range(len(g)):
        if seen[i]:
            continue
        k, j = 0, i
        while not seen[j]:
            seen[j] = 1
            j = g[j]
            k += 1
        out = lcm(out, k)
    return out


def check_perm(g: Sequence[int]) -> None:
    if sorted(g) != list(range(len(g))):
        raise ValueError("not a permutation")


def image_set(g: Perm, s: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(g[x] for x in s))


class CycleSyntaxError(ValueError):
    pass


_TOKEN = re.compile(r"[ \t\r]*(?:(\()|(\))|(,)|(\d+)|(#[^\n]*)|(\n[ \t\r]*\n\s*)|(\n))")


def parse_cycles(text: str, n: int) -> list[Perm]:
    """Parse one or more permutations written in disjoint-cycle notation.

    Points are 1-based and must lie in ``1..n``.  Permutations are separated
    either by a comma between cycles (GAP list style) or by a blank line.
    ``()`` is the identity.  Returned tuples have length ``n + 1`` with a
    fixed sentinel at index 0.
    """
    perms: list[list[int]] = []
    current: list[int] | None = None
    used: set[int] = set()
    cycle: list[int] | None = None
    pos = 0
    text = text.strip().lstrip("[").rstrip("]")

    def finish():
        nonlocal current, used
        if current is not None:
            perms.append(current)
        current, used = None, set()

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise CycleSyntaxError(f"unexpected character {text[pos]!r} at offset {pos}")
        pos = m.end()
        lpar, rpar, comma, num, _comment, blank, _newline = m.groups()
        if blank is not None:
            if cycle is not None:
                raise CycleSyntaxError("blank line inside a cycle")
            finish()
        elif lpar:
            if cycle is not None:
                raise CycleSyntaxError("nested parenthesis")
            if current is None:
                current = list(range(n + 1))
            cycle = []
        elif rpar:
            if cycle is None:
                raise CycleSyntaxError("unbalanced ')'")
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                current[a] = b
            cycle = None
        elif comma:
            if cycle is None:
                finish()
        elif num is not None:
            if cycle is None:
                raise CycleSyntaxError(f"point {num} outside a cycle")
            x = int(num)
            if not 1 <= x <= n:
                raise CycleSyntaxError(f"point {x} out of range 1..{n}")
            if x in used:
                raise CycleSyntaxError(f"point {x} repeated within a permutation")
            used.add(x)
            cycle.append(x)
    if cycle is not None:
        raise CycleSyntaxError("unterminated cycle")
    finish()
    return [tuple(p) for p in perms]


def format_cycles(g: Perm) -> str:
    """Cycle notation of a sentinel-based point permutation (1-based)."""
    seen = set()
    out = []
    for i in range(1, len(g)):
        if i in seen or g[i] == i:
            continue
        cyc = [i]
        j = g[i]
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = g[j]
        out.append("(" + ",".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def format_images(g: Perm) -> str:
    """One-line image form ``"n: i1 i2 ... in"`` of a point permutation."""
    n = len(g) - 1
    return f"{n}: " + " ".join(str(g[i]) for i in range(1, n + 1))


def parse_images(text: str) -> Perm:
    head, _, rest = text.partition(":")
    n = int(head)
    imgs = [int(x) for x in rest.split()]
    if len(imgs) != n:
        raise ValueError(f"expected {n} images, got {len(imgs)}")
    g = (0, *imgs)
    check_perm(g)
    return g
