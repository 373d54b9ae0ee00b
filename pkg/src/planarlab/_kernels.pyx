# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Mirrors ``_pykernels`` function for function."""

import numpy as np

from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t, uint8_t


cdef inline Py_ssize_t _lower_bound(int64_t* a, Py_ssize_t n, int64_t x) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline Py_ssize_t _upper_bound(int64_t* a, Py_ssize_t n, int64_t x) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def lis_strict(const int64_t[::1] seq):
    cdef Py_ssize_t n = seq.shape[0], i, pos, length = 0
    if n == 0:
        return 0
    cdef int64_t* tails = <int64_t*> malloc(n * sizeof(int64_t))
    if tails == NULL:
        raise MemoryError()
    with nogil:
        for i in range(n):
            pos = _lower_bound(tails, length, seq[i])
            tails[pos] = seq[i]
            if pos == length:
                length += 1
    free(tails)
    return length


def lis_end_lengths(const int64_t[::1] seq):
    cdef Py_ssize_t n = seq.shape[0], i, pos, length = 0
    out = np.zeros(n, dtype=np.int64)
    if n == 0:
        return out
    cdef int64_t[::1] res = out
    cdef int64_t* tails = <int64_t*> malloc(n * sizeof(int64_t))
    if tails == NULL:
        raise MemoryError()
    with nogil:
        for i in range(n):
            pos = _lower_bound(tails, length, seq[i])
            tails[pos] = seq[i]
            if pos == length:
                length += 1
            res[i] = pos + 1
    free(tails)
    return out


def lcs_sparse(const int64_t[::1] order, const int64_t[::1] lo, const int64_t[::1] hi):
    """Hunt-Szymanski threshold sweep.

    ``order`` lists word-b positions grouped by character (ascending inside a
    group); ``lo[i]:hi[i]`` is the group matching word_a[i].
    """
    cdef Py_ssize_t r = lo.shape[0], s = order.shape[0], i, idx, pos, length = 0
    cdef int64_t j
    if r == 0 or s == 0:
        return 0
    cdef int64_t* thresh = <int64_t*> malloc(s * sizeof(int64_t))
    if thresh == NULL:
        raise MemoryError()
    with nogil:
        for i in range(r):
            idx = hi[i] - 1
            while idx >= lo[i]:
                j = order[idx]
                pos = _lower_bound(thresh, length, j)
                thresh[pos] = j
                if pos == length:
                    length += 1
                idx -= 1
    free(thresh)
    return length


def lcs_dp(const int64_t[::1] a, const int64_t[::1] b):
    cdef Py_ssize_t r = a.shape[0], s = b.shape[0], i, j
    cdef int64_t diag, up, best
    if r == 0 or s == 0:
        return 0
    cdef int64_t* row = <int64_t*> malloc((s + 1) * sizeof(int64_t))
    if row == NULL:
        raise MemoryError()
    with nogil:
        for j in range(s + 1):
            row[j] = 0
        for i in range(r):
            diag = 0
            for j in range(1, s + 1):
                up = row[j]
                if a[i] == b[j - 1]:
                    best = diag + 1
                elif up >= row[j - 1]:
                    best = up
                else:
                    best = row[j - 1]
                diag = up
                row[j] = best
    best = row[s]
    free(row)
    return best


def max_weight_planar(const int64_t[:, ::1] w):
    """Row sweep with a Fenwick prefix-max over columns."""
    cdef Py_ssize_t r = w.shape[0], s = w.shape[1], i, j, x, cnt
    cdef int64_t q, best = 0
    if r == 0 or s == 0:
        return 0
    cdef int64_t* tree = <int64_t*> malloc((s + 1) * sizeof(int64_t))
    cdef int64_t* vals = <int64_t*> malloc(s * sizeof(int64_t))
    cdef Py_ssize_t* cols = <Py_ssize_t*> malloc(s * sizeof(Py_ssize_t))
    if tree == NULL or vals == NULL or cols == NULL:
        free(tree); free(vals); free(cols)
        raise MemoryError()
    with nogil:
        for j in range(s + 1):
            tree[j] = 0
        for i in range(r):
            cnt = 0
            # queries for the whole row first: cells sharing a row never chain
            for j in range(s):
                if w[i, j] > 0:
                    q = 0
                    x = j  # prefix over columns 1..j (1-based), i.e. strictly left
                    while x > 0:
                        if tree[x] > q:
                            q = tree[x]
                        x -= x & (-x)
                    cols[cnt] = j
                    vals[cnt] = q + w[i, j]
                    cnt += 1
            for x in range(cnt):
                if vals[x] > best:
                    best = vals[x]
                j = cols[x] + 1
                while j <= s:
                    if tree[j] < vals[x]:
                        tree[j] = vals[x]
                    j += j & (-j)
    free(tree); free(vals); free(cols)
    return best


def odb_height(const uint8_t[:, ::1] m):
    cdef Py_ssize_t r = m.shape[0], s = m.shape[1], i, j, pos, length = 0
    if r == 0 or s == 0:
        return 0
    cdef int64_t* tails = <int64_t*> malloc(r * sizeof(int64_t))
    if tails == NULL:
        raise MemoryError()
    with nogil:
        for i in range(r):
            j = s - 1
            while j >= 0:
                if m[i, j]:
                    pos = _upper_bound(tails, length, j)
                    if pos < r:
                        tails[pos] = j
                        if pos == length:
                            length += 1
                j -= 1
    free(tails)
    return length
