# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see ``_kernels_py`` for the contract).

Entries are int64 here; ``nilmetric.kernels`` only dispatches inputs whose
values provably fit.
"""
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memcpy
from libc.stdint cimport int64_t
from cpython.bytes cimport PyBytes_FromStringAndSize

import numpy as np

from .errors import ResourceLimit


cdef struct Entry:
    int kind
    int y
    int64_t e
    int c
    int sc
    int64_t m


cdef inline int64_t iabs(int64_t v) nogil:
    return -v if v < 0 else v


cdef inline int isign(int64_t v) nogil:
    return 1 if v > 0 else -1


cdef class _Stack:
    cdef Entry* data
    cdef Py_ssize_t size, cap

    def __cinit__(self):
        self.cap = 1024
        self.size = 0
        self.data = <Entry*> malloc(self.cap * sizeof(Entry))
        if self.data == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.data)

    cdef void push(self, int kind, int y, int64_t e, int c, int sc, int64_t m) except *:
        cdef Entry* nd
        if self.size == self.cap:
            nd = <Entry*> realloc(self.data, 2 * self.cap * sizeof(Entry))
            if nd == NULL:
                raise MemoryError()
            self.data = nd
            self.cap *= 2
        self.data[self.size].kind = kind
        self.data[self.size].y = y
        self.data[self.size].e = e
        self.data[self.size].c = c
        self.data[self.size].sc = sc
        self.data[self.size].m = m
        self.size += 1


cdef inline void _merge(int64_t* ex, int64_t* counts, int g, int64_t e) nogil:
    cdef int64_t cur = ex[g]
    cdef int64_t a, b
    if cur != 0 and ((cur > 0) != (e > 0)):
        a = iabs(cur)
        b = iabs(e)
        counts[g] -= 2 * (a if a < b else b)
    ex[g] = cur + e


def collect_units(int n_gens, corr_list, csign_list, letters):
    cdef int N = n_gens
    cdef int* corr = <int*> malloc(N * N * sizeof(int))
    cdef int* csign = <int*> malloc(N * N * sizeof(int))
    cdef int64_t* ex = <int64_t*> malloc(N * sizeof(int64_t))
    cdef int64_t* counts = <int64_t*> malloc(N * sizeof(int64_t))
    cdef int64_t* peak = <int64_t*> malloc(N * sizeof(int64_t))
    cdef _Stack st = _Stack()
    cdef Entry ent
    cdef int g, y, h, t, x, sx, c, sc, commuting, kind
    cdef int64_t e, b, m, passed, u0
    cdef int64_t swaps = 0
    cdef object swaps_total = 0
    cdef Py_ssize_t k
    try:
        for k in range(N * N):
            corr[k] = corr_list[k]
            csign[k] = csign_list[k]
        for g in range(N):
            ex[g] = 0
            counts[g] = 0
        for r, v in letters:
            counts[<int> r] += iabs(<int64_t> v)
        for g in range(N):
            peak[g] = counts[g]
        for k in range(len(letters) - 1, -1, -1):
            r, v = letters[k]
            if v:
                st.push(0, r, v, 0, 0, 0)

        while st.size > 0:
            if swaps > (<int64_t> 1 << 60):
                swaps_total += swaps
                swaps = 0
            st.size -= 1
            ent = st.data[st.size]
            kind = ent.kind
            y = ent.y
            e = ent.e
            if kind == 0:
                t = isign(e)
                commuting = 1
                passed = 0
                for g in range(y):
                    if ex[g] != 0:
                        if corr[g * N + y] >= 0:
                            commuting = 0
                            break
                        passed += iabs(ex[g])
                if commuting:
                    swaps += iabs(e) * passed
                    _merge(ex, counts, y, e)
                    continue
                if e != t:
                    st.push(0, y, e - t, 0, 0, 0)
                for g in range(y):
                    b = ex[g]
                    if b == 0:
                        continue
                    ex[g] = 0
                    swaps += iabs(b)
                    h = corr[g * N + y]
                    if h < 0:
                        st.push(0, g, b, 0, 0, 0)
                    else:
                        sx = isign(b)
                        counts[h] += iabs(b)
                        if counts[h] > peak[h]:
                            peak[h] = counts[h]
                        st.push(1, g, sx, h, csign[g * N + y] * sx * t, iabs(b))
                _merge(ex, counts, y, t)
            else:
                x = y
                sx = <int> e
                c = ent.c
                sc = ent.sc
                m = ent.m
                commuting = 1
                passed = 0
                for g in range(c):
                    if ex[g] != 0 and g != x:
                        if corr[g * N + c] >= 0:
                            commuting = 0
                            break
                        passed += iabs(ex[g])
                if commuting:
                    u0 = iabs(ex[x])
                    swaps_total += (<object> m) * passed + (<object> m) * u0 + (<object> m) * (m + 1) // 2
                    _merge(ex, counts, x, sx * m)
                    _merge(ex, counts, c, sc * m)
                    continue
                if m > 1:
                    st.push(1, x, sx, c, sc, m - 1)
                st.push(0, c, sc, 0, 0, 0)
                _merge(ex, counts, x, sx)
        swaps_total += swaps
        return [ex[g] for g in range(N)], [peak[g] for g in range(N)], swaps_total
    finally:
        free(corr)
        free(csign)
        free(ex)
        free(counts)
        free(peak)


def bfs_ball(int n_entries, moves, int radius, Py_ssize_t budget):
    cdef int n_moves = len(moves)
    cdef int* npairs = <int*> malloc(n_moves * sizeof(int))
    cdef int* direct = <int*> malloc(n_moves * sizeof(int))
    cdef int* sgn = <int*> malloc(n_moves * sizeof(int))
    cdef int* pdst = <int*> malloc(n_moves * n_entries * sizeof(int))
    cdef int* psrc = <int*> malloc(n_moves * n_entries * sizeof(int))
    cdef Py_ssize_t cap = 4096
    cdef int64_t* buf = <int64_t*> malloc(cap * n_entries * sizeof(int64_t))
    cdef int64_t* nb
    cdef int64_t* tmp = <int64_t*> malloc(n_entries * sizeof(int64_t))
    cdef int64_t* v0
    cdef Py_ssize_t count = 1, lo = 0, hi = 1, s_idx, found
    cdef int mi, q, r, sz = n_entries * sizeof(int64_t)
    cdef int64_t a
    cdef dict index = {}
    cdef list dist = [0], parent = [-1], via = [-1], spheres = [1]
    try:
        for mi in range(n_moves):
            pairs, d, s = moves[mi]
            npairs[mi] = len(pairs)
            direct[mi] = d
            sgn[mi] = s
            for q in range(len(pairs)):
                pdst[mi * n_entries + q] = pairs[q][0]
                psrc[mi * n_entries + q] = pairs[q][1]
        for q in range(n_entries):
            buf[q] = 0
        index[PyBytes_FromStringAndSize(<char*> buf, sz)] = 0
        for r in range(1, radius + 1):
            found = 0
            for s_idx in range(lo, hi):
                for mi in range(n_moves):
                    v0 = buf + s_idx * n_entries
                    memcpy(tmp, v0, sz)
                    for q in range(npairs[mi]):
                        a = v0[psrc[mi * n_entries + q]]
                        if a != 0:
                            tmp[pdst[mi * n_entries + q]] += sgn[mi] * a
                    tmp[direct[mi]] += sgn[mi]
                    key = PyBytes_FromStringAndSize(<char*> tmp, sz)
                    if key in index:
                        continue
                    if count >= budget:
                        raise ResourceLimit(
                            f"ball exceeds budget of {budget} elements at radius {r}", partial=r - 1
                        )
                    if count == cap:
                        nb = <int64_t*> realloc(buf, 2 * cap * n_entries * sizeof(int64_t))
                        if nb == NULL:
                            raise MemoryError()
                        buf = nb
                        cap *= 2
                    memcpy(buf + count * n_entries, tmp, sz)
                    index[key] = count
                    count += 1
                    dist.append(r)
                    parent.append(s_idx)
                    via.append(mi)
                    found += 1
            spheres.append(found)
            lo = hi
            hi = count
            if found == 0:
                break
        states = [tuple([buf[s_idx * n_entries + q] for q in range(n_entries)]) for s_idx in range(count)]
        return states, dist, parent, via, spheres
    finally:
        free(npairs)
        free(direct)
        free(sgn)
        free(pdst)
        free(psrc)
        free(buf)
        free(tmp)


def min_power_parts(int k, Py_ssize_t size):
    cdef object out = np.arange(size, dtype=np.int64)
    cdef int64_t[::1] dp = out
    cdef Py_ssize_t n, s
    cdef int64_t cand
    cdef Py_ssize_t q = 2
    while q ** k < size:
        s = q ** k
        for n in range(s, size):
            cand = dp[n - s] + 1
            if cand < dp[n]:
                dp[n] = cand
        q += 1
    return out
