# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.  Every function here has a twin in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, realloc, free, qsort
from libc.stdint cimport uint64_t, int32_t, uint32_t

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

BACKEND = "cython"


cdef class ExactCover:
    """Dancing-links exact cover over columns ``0..ncols-1``.

    Column choice: fewest remaining rows, ties to the smallest column id;
    rows are tried in ascending row id.
    """
    cdef public int ncols, nrows
    cdef int nnodes
    cdef int *L
    cdef int *R
    cdef int *U
    cdef int *D
    cdef int *C
    cdef int *S
    cdef int *ROW
    cdef int *O
    cdef int *row_first
    cdef long long count, nodes, budget, limit
    cdef int mode, stopped
    cdef int *buf
    cdef long long buflen, bufcap
    cdef long long *offs
    cdef long long nsol, offcap
    cdef object callback

    def __cinit__(self, int ncols, rows):
        cdef int i, j, c, node, first, prev, total = 0
        rows = [list(r) for r in rows]
        for r in rows:
            if len(r) == 0:
                raise ValueError("empty row")
            for c in r:
                if c < 0 or c >= ncols:
                    raise ValueError(f"column {c} out of range")
            total += len(r)
        self.ncols = ncols
        self.nrows = len(rows)
        self.nnodes = ncols + 1 + total
        n = self.nnodes
        self.L = <int *> malloc(n * sizeof(int))
        self.R = <int *> malloc(n * sizeof(int))
        self.U = <int *> malloc(n * sizeof(int))
        self.D = <int *> malloc(n * sizeof(int))
        self.C = <int *> malloc(n * sizeof(int))
        self.S = <int *> malloc((ncols + 1) * sizeof(int))
        self.ROW = <int *> malloc(n * sizeof(int))
        self.O = <int *> malloc((self.nrows + 1) * sizeof(int))
        self.row_first = <int *> malloc((self.nrows + 1) * sizeof(int))
        self.buf = NULL
        self.offs = NULL
        # header 0 is the root; column c lives at header c + 1
        for i in range(ncols + 1):
            self.L[i] = i - 1 if i > 0 else ncols
            self.R[i] = i + 1 if i < ncols else 0
            self.U[i] = i
            self.D[i] = i
            self.C[i] = i
            self.S[i] = 0
            self.ROW[i] = -1
        node = ncols + 1
        for i, r in enumerate(rows):
            first = node
            self.row_first[i] = node
            for j, c in enumerate(sorted(set(r))):
                c = c + 1
                self.C[node] = c
                self.ROW[node] = i
                self.U[node] = self.U[c]
                self.D[node] = c
                self.D[self.U[c]] = node
                self.U[c] = node
                self.S[c] += 1
                if j == 0:
                    self.L[node] = node
                    self.R[node] = node
                else:
                    prev = self.L[first]
                    self.L[node] = prev
                    self.R[node] = first
                    self.R[prev] = node
                    self.L[first] = node
                node += 1

    def __dealloc__(self):
        free(self.L); free(self.R); free(self.U); free(self.D); free(self.C)
        free(self.S); free(self.ROW); free(self.O); free(self.row_first)
        if self.buf != NULL:
            free(self.buf)
        if self.offs != NULL:
            free(self.offs)

    cdef inline void _cover(self, int c):
        cdef int i, j
        self.R[self.L[c]] = self.R[c]
        self.L[self.R[c]] = self.L[c]
        i = self.D[c]
        while i != c:
            j = self.R[i]
            while j != i:
                self.D[self.U[j]] = self.D[j]
                self.U[self.D[j]] = self.U[j]
                self.S[self.C[j]] -= 1
                j = self.R[j]
            i = self.D[i]

    cdef inline void _uncover(self, int c):
        cdef int i, j
        i = self.U[c]
        while i != c:
            j = self.L[i]
            while j != i:
                self.S[self.C[j]] += 1
                self.D[self.U[j]] = j
                self.U[self.D[j]] = j
                j = self.L[j]
            i = self.U[i]
        self.R[self.L[c]] = c
        self.L[self.R[c]] = c

    cdef int _choose(self):
        cdef int j = self.R[0], c = -1, best = 1 << 30
        while j != 0:
            if self.S[j] < best:
                best = self.S[j]
                c = j
            j = self.R[j]
        return c

    cdef int _record(self, int k) except -1:
        cdef int i, a, b, t
        cdef int *dst
        if self.mode == 0:
            return 0
        if self.mode == 1:
            while self.buflen + k > self.bufcap:
                self.bufcap = self.bufcap * 2 + 1024
                self.buf = <int *> realloc(self.buf, self.bufcap * sizeof(int))
                if self.buf == NULL:
                    raise MemoryError()
            if self.nsol + 2 > self.offcap:
                self.offcap = self.offcap * 2 + 1024
                self.offs = <long long *> realloc(self.offs, self.offcap * sizeof(long long))
                if self.offs == NULL:
                    raise MemoryError()
            dst = self.buf + self.buflen
            for i in range(k):
                dst[i] = self.ROW[self.O[i]]
            # insertion sort: solutions are reported as ascending row ids
            for a in range(1, k):
                t = dst[a]
                b = a - 1
                while b >= 0 and dst[b] > t:
                    dst[b + 1] = dst[b]
                    b -= 1
                dst[b + 1] = t
            self.buflen += k
            self.nsol += 1
            self.offs[self.nsol] = self.buflen
        else:
            sol = sorted([self.ROW[self.O[i]] for i in range(k)])
            if self.callback(tuple(sol)) is False:
                self.stopped = 1
        return 0

    cdef int _search(self, int k) except -1:
        cdef int c, r, j
        if self.R[0] == 0:
            self.count += 1
            self._record(k)
            if self.limit > 0 and self.count >= self.limit:
                self.stopped = 1
            return 0
        c = self._choose()
        if self.S[c] == 0:
            return 0
        self._cover(c)
        r = self.D[c]
        while r != c:
            self.nodes += 1
            if self.budget > 0 and self.nodes > self.budget:
                self.stopped = 2
                break
            self.O[k] = r
            j = self.R[r]
            while j != r:
                self._cover(self.C[j])
                j = self.R[j]
            self._search(k + 1)
            j = self.L[r]
            while j != r:
                self._uncover(self.C[j])
                j = self.L[j]
            if self.stopped:
                break
            r = self.D[r]
        self._uncover(c)
        return 0

    def root_rows(self):
        """Rows of the column the solver branches on first (ascending)."""
        cdef int c = self._choose()
        if c < 0:
            return []
        out = []
        r = self.D[c]
        while r != c:
            out.append(self.ROW[r])
            r = self.D[r]
        return out

    def root_column(self):
        cdef int c = self._choose()
        return c - 1 if c > 0 else -1

    cdef int _run(self, int first_row) except -1:
        cdef int node, j
        self.count = 0
        self.nodes = 0
        self.stopped = 0
        self.buflen = 0
        self.nsol = 0
        if self.mode == 1:
            if self.offs == NULL:
                self.offcap = 1024
                self.offs = <long long *> malloc(self.offcap * sizeof(long long))
            self.offs[0] = 0
        if first_row < 0:
            self._search(0)
            return 0
        if first_row >= self.nrows:
            raise ValueError("first_row out of range")
        node = self.row_first[first_row]
        self.nodes += 1
        self.O[0] = node
        self._cover(self.C[node])
        j = self.R[node]
        while j != node:
            self._cover(self.C[j])
            j = self.R[j]
        self._search(1)
        j = self.L[node]
        while j != node:
            self._uncover(self.C[j])
            j = self.L[j]
        self._uncover(self.C[node])
        return 0

    def count_solutions(self, first_row=None, budget=None, limit=None):
        """Returns (count, nodes, complete)."""
        self.mode = 0
        self.budget = budget or 0
        self.limit = limit or 0
        self._run(-1 if first_row is None else first_row)
        return int(self.count), int(self.nodes), self.stopped == 0

    def collect(self, first_row=None, budget=None, limit=None):
        """Returns (flat row ids, offsets, complete) for all solutions."""
        self.mode = 1
        self.budget = budget or 0
        self.limit = limit or 0
        self._run(-1 if first_row is None else first_row)
        flat = np.empty(self.buflen, dtype=np.int32)
        offs = np.empty(self.nsol + 1, dtype=np.int64)
        cdef int[::1] fv = flat
        cdef long long[::1] ov = offs
        cdef long long i
        for i in range(self.buflen):
            fv[i] = self.buf[i]
        for i in range(self.nsol + 1):
            ov[i] = self.offs[i]
        free(self.buf)
        self.buf = NULL
        self.bufcap = 0
        return flat, offs, self.stopped == 0

    def visit(self, callback, first_row=None, budget=None, limit=None):
        """Call ``callback(rows)`` per solution; returning False stops early."""
        self.mode = 2
        self.callback = callback
        self.budget = budget or 0
        self.limit = limit or 0
        try:
            self._run(-1 if first_row is None else first_row)
        finally:
            self.callback = None
        return int(self.count), int(self.nodes), self.stopped == 0


cdef int _cmp_u32(const void *a, const void *b) noexcept nogil:
    cdef uint32_t x = (<uint32_t *> a)[0], y = (<uint32_t *> b)[0]
    return (x > y) - (x < y)


def bundle_invariants(const int[:, ::1] sols, const int[:, ::1] row_pairs,
                      const int[:, ::1] row_nbrs, const int[::1] m_line,
                      const int[:, ::1] m_nb, const int[:, ::1] m_pairs, int npairs):
    """Grid count, s and t_1..t_10 for each bundle (one row of local line ids).

    Tables (all relative to one apex p, local ids index the lines through p):
      row_pairs[l]  P-pair ids covered by the lines meeting line l in an edge
      row_nbrs[l]   neighbour ids (0..111) of the 4 non-apex points of l
      m_line[m]     local line through p and both p-neighbours of line m
      m_nb[m]       those two neighbour ids
      m_pairs[m]    the 3 P-pair ids of line m
    """
    cdef Py_ssize_t nb = sols.shape[0], nm = m_line.shape[0], w = row_pairs.shape[1]
    cdef Py_ssize_t nlocal = row_pairs.shape[0], k = sols.shape[1]
    out = np.zeros((nb, 12), dtype=np.int32)
    cdef int[:, ::1] o = out
    cdef unsigned char *cnt = <unsigned char *> malloc(npairs)
    cdef int *stamp = <int *> malloc(npairs * sizeof(int))
    cdef int *owner = <int *> malloc(112 * sizeof(int))
    cdef char *inb = <char *> malloc(nlocal)
    cdef int *hits = <int *> malloc(k * sizeof(int))
    cdef uint32_t *keys = <uint32_t *> malloc(nlocal * sizeof(uint32_t))
    cdef Py_ssize_t b, i, j, m, nk
    cdef int l, c, mn, run, grid, pid, hist[11]
    cdef uint32_t key
    for i in range(npairs):
        cnt[i] = 0
        stamp[i] = 0
    try:
        for b in range(nb):
            for i in range(nlocal):
                inb[i] = 0
            for i in range(k):
                l = sols[b, i]
                inb[l] = 1
                hits[i] = 0
                for j in range(4):
                    owner[row_nbrs[l, j]] = i
                for j in range(w):
                    cnt[row_pairs[l, j]] += 1
            for i in range(11):
                hist[i] = 0
            for i in range(k):
                l = sols[b, i]
                for j in range(w):
                    pid = row_pairs[l, j]
                    if stamp[pid] != b + 1:
                        stamp[pid] = b + 1
                        c = cnt[pid]
                        if c > 10:
                            raise ValueError("pair covered more than 10 times")
                        hist[c] += 1
            # lines meeting two bundle lines once each and no covered pair
            for m in range(nm):
                if inb[m_line[m]]:
                    continue
                if (cnt[m_pairs[m, 0]] | cnt[m_pairs[m, 1]] | cnt[m_pairs[m, 2]]) == 0:
                    hits[owner[m_nb[m, 0]]] += 1
                    hits[owner[m_nb[m, 1]]] += 1
            mn = hits[0]
            for i in range(1, k):
                if hits[i] < mn:
                    mn = hits[i]
            for i in range(k):
                l = sols[b, i]
                for j in range(w):
                    cnt[row_pairs[l, j]] = 0
            nk = 0
            for l in range(nlocal):
                if inb[l]:
                    continue
                key = 0
                for j in range(4):
                    key |= (<uint32_t> 1) << owner[row_nbrs[l, j]]
                keys[nk] = key
                nk += 1
            qsort(keys, nk, sizeof(uint32_t), _cmp_u32)
            grid = 0
            run = 1
            for i in range(1, nk + 1):
                if i < nk and keys[i] == keys[i - 1]:
                    run += 1
                else:
                    if run == 4:
                        grid += 1
                    elif run > 4:
                        raise ValueError("more than four transversal lines")
                    run = 1
            o[b, 0] = grid
            o[b, 1] = mn
            for i in range(1, 11):
                o[b, 1 + i] = hist[i]
    finally:
        free(cnt); free(stamp); free(owner); free(inb); free(hits); free(keys)
    return out


def filter_disjoint(const uint64_t[:, ::1] fps, const int[::1] cand, const uint64_t[::1] word):
    """Entries of ``cand`` whose fingerprint row shares no bit with ``word``."""
    cdef Py_ssize_t i, n = cand.shape[0], k = 0
    cdef int c
    out = np.empty(n, dtype=np.int32)
    cdef int[::1] ov = out
    cdef uint64_t w0 = word[0], w1 = word[1], w2 = word[2], w3 = word[3], w4 = word[4]
    with nogil:
        for i in range(n):
            c = cand[i]
            if ((fps[c, 0] & w0) | (fps[c, 1] & w1) | (fps[c, 2] & w2)
                    | (fps[c, 3] & w3) | (fps[c, 4] & w4)) == 0:
                ov[k] = c
                k += 1
    return out[:k].copy()


def naive_compatible(const uint64_t[:, ::1] line_masks, const int[:, ::1] a,
                     const int[:, ::1] b):
    """For each row pair, 1 iff no line of a[i] meets a line of b[i] in exactly 2 points."""
    cdef Py_ssize_t n = a.shape[0], ka = a.shape[1], kb = b.shape[1], i, x, y, w
    cdef int inter, ok
    out = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] ov = out
    with nogil:
        for i in range(n):
            ok = 1
            for x in range(ka):
                for y in range(kb):
                    inter = 0
                    for w in range(line_masks.shape[1]):
                        inter = inter + __builtin_popcountll(
                            line_masks[a[i, x], w] & line_masks[b[i, y], w])
                    if inter == 2:
                        ok = 0
                        break
                if not ok:
                    break
            ov[i] = ok
    return out


def count_independent_sets(const uint64_t[:, ::1] adj, int n, int size):
    """Number of independent ``size``-subsets of a graph on ``n <= 128`` vertices."""
    if n > 128:
        raise ValueError("at most 128 vertices")
    cdef uint64_t lo = (<uint64_t> -1) if n >= 64 else (((<uint64_t> 1) << n) - 1)
    cdef uint64_t hi = 0
    if n > 64:
        hi = (<uint64_t> -1) if n >= 128 else (((<uint64_t> 1) << (n - 64)) - 1)
    return _count_is(adj, lo, hi, size)


cdef inline int _ctz(uint64_t x) noexcept nogil:
    return __builtin_ctzll(x)


cdef long long _count_is(const uint64_t[:, ::1] adj, uint64_t lo, uint64_t hi, int size) noexcept nogil:
    cdef long long total = 0
    cdef int v
    cdef uint64_t bit
    if size == 0:
        return 1
    if size == 1:
        return __builtin_popcountll(lo) + __builtin_popcountll(hi)
    while lo or hi:
        if lo:
            bit = lo & (~lo + 1)
            v = _ctz(bit)
            lo ^= bit
        else:
            bit = hi & (~hi + 1)
            v = 64 + _ctz(bit)
            hi ^= bit
        # candidates after v that are not adjacent to v
        total += _count_is(adj, lo & ~adj[v, 0], hi & ~adj[v, 1], size - 1)
    return total
