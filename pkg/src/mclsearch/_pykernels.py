"""Pure-Python twins of the compiled kernels in ``_ckernels.pyx``.

Same signatures, same results, same solution order; used when the
extension is not built or ``MCLSEARCH_PURE=1`` is set.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


class _Stop(Exception):
    pass


class ExactCover:
    """Algorithm X over row/column sets.

    Column choice: fewest remaining rows, ties to the smallest column id;
    rows are tried in ascending row id.
    """

    def __init__(self, ncols, rows):
        rows = [sorted(set(r)) for r in rows]
        for r in rows:
            if not r:
                raise ValueError("empty row")
            for c in r:
                if not 0 <= c < ncols:
                    raise ValueError(f"column {c} out of range")
        self.ncols = ncols
        self.nrows = len(rows)
        self._rows = rows
        self._cols = [[] for _ in range(ncols)]
        for i, r in enumerate(rows):
            for c in r:
                self._cols[c].append(i)

    def _fresh(self):
        return {c: set(rs) for c, rs in enumerate(self._cols)}

    @staticmethod
    def _choose(X):
        return min(X, key=lambda c: (len(X[c]), c)) if X else None

    def _select(self, X, r):
        removed = []
        for c in self._rows[r]:
            for i in X[c]:
                for k in self._rows[i]:
                    if k != c:
                        X[k].discard(i)
            removed.append(X.pop(c))
        return removed

    def _deselect(self, X, r, removed):
        for c in reversed(self._rows[r]):
            X[c] = removed.pop()
            for i in X[c]:
                for k in self._rows[i]:
                    if k != c:
                        X[k].add(i)

    def _run(self, on_solution, first_row, budget, limit):
        X = self._fresh()
        state = {"count": 0, "nodes": 0, "stopped": 0}
        sol: list[int] = []

        def search():
            if not X:
                state["count"] += 1
                if on_solution(tuple(sorted(sol))) is False:
                    state["stopped"] = 1
                if limit and state["count"] >= limit:
                    state["stopped"] = 1
                if state["stopped"]:
                    raise _Stop
                return
            c = self._choose(X)
            for r in sorted(X[c]):
                state["nodes"] += 1
                if budget and state["nodes"] > budget:
                    state["stopped"] = 2
                    raise _Stop
                sol.append(r)
                removed = self._select(X, r)
                try:
                    search()
                finally:
                    self._deselect(X, r, removed)
                    sol.pop()

        try:
            if first_row is None:
                search()
            else:
                if not 0 <= first_row < self.nrows:
                    raise ValueError("first_row out of range")
                state["nodes"] += 1
                sol.append(first_row)
                self._select(X, first_row)
                search()
        except _Stop:
            pass
        return state["count"], state["nodes"], state["stopped"] == 0

    def root_rows(self):
        X = self._fresh()
        c = self._choose(X)
        return [] if c is None else sorted(X[c])

    def root_column(self):
        c = self._choose(self._fresh())
        return -1 if c is None else c

    def count_solutions(self, first_row=None, budget=None, limit=None):
        return self._run(lambda s: None, first_row, budget, limit)

    def collect(self, first_row=None, budget=None, limit=None):
        flat: list[int] = []
        offs = [0]

        def keep(s):
            flat.extend(s)
            offs.append(len(flat))

        _, _, complete = self._run(keep, first_row, budget, limit)
        return np.asarray(flat, dtype=np.int32), np.asarray(offs, dtype=np.int64), complete

    def visit(self, callback, first_row=None, budget=None, limit=None):
        return self._run(callback, first_row, budget, limit)


def bundle_invariants(sols, row_pairs, row_nbrs, m_line, m_nb, m_pairs, npairs):
    sols = np.asarray(sols)
    out = np.zeros((len(sols), 12), dtype=np.int32)
    row_pairs = np.asarray(row_pairs)
    row_nbrs = np.asarray(row_nbrs)
    m_line = np.asarray(m_line)
    m_nb = np.asarray(m_nb)
    m_pairs = np.asarray(m_pairs)
    nlocal = len(row_pairs)
    for b, sol in enumerate(sols):
        k = len(sol)
        owner = np.full(112, -1, dtype=np.int64)
        for i, l in enumerate(sol):
            owner[row_nbrs[l]] = i
        inb = np.zeros(nlocal, dtype=bool)
        inb[sol] = True
        cnt = np.bincount(row_pairs[sol].ravel(), minlength=npairs)
        if cnt.max() > 10:
            raise ValueError("pair covered more than 10 times")
        hist = np.bincount(cnt, minlength=11)
        sel = ~inb[m_line]
        clear = (cnt[m_pairs] == 0).all(axis=1) & sel
        hits = np.bincount(owner[m_nb[clear]].ravel(), minlength=k)
        keys = {}
        for l in range(nlocal):
            if inb[l]:
                continue
            key = frozenset(owner[row_nbrs[l]].tolist())
            keys[key] = keys.get(key, 0) + 1
        if max(keys.values(), default=0) > 4:
            raise ValueError("more than four transversal lines")
        out[b, 0] = sum(1 for v in keys.values() if v == 4)
        out[b, 1] = hits.min()
        out[b, 2:] = hist[1:11]
    return out


def filter_disjoint(fps, cand, word):
    fps = np.asarray(fps)
    cand = np.asarray(cand, dtype=np.int32)
    word = np.asarray(word, dtype=np.uint64)
    if len(cand) == 0:
        return cand.copy()
    keep = ~((fps[cand] & word[None, :]) != 0).any(axis=1)
    return cand[keep].copy()


def naive_compatible(line_masks, a, b):
    masks = [sum(int(w) << (64 * i) for i, w in enumerate(row)) for row in np.asarray(line_masks)]
    out = np.empty(len(a), dtype=np.uint8)
    for i, (ra, rb) in enumerate(zip(np.asarray(a), np.asarray(b))):
        mb = [masks[y] for y in rb]
        out[i] = not any((masks[x] & m).bit_count() == 2 for x in ra for m in mb)
    return out


def count_independent_sets(adj, n, size):
    if n > 128:
        raise ValueError("at most 128 vertices")
    rows = [int(r[0]) | (int(r[1]) << 64) for r in np.asarray(adj)]

    def rec(cand, k):
        if k == 0:
            return 1
        if k == 1:
            return cand.bit_count()
        total = 0
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            total += rec(cand & ~rows[v], k - 1)
        return total

    return rec((1 << n) - 1, size)
