"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Same names, same argument conventions, same results. Used when the extension
is not built or when ``PLANARLAB_PURE=1`` is set.
"""
from bisect import bisect_left, bisect_right

import numpy as np


def lis_strict(seq):
    tails = []
    for x in seq.tolist():
        pos = bisect_left(tails, x)
        if pos == len(tails):
            tails.append(x)
        else:
            tails[pos] = x
    return len(tails)


def lis_end_lengths(seq):
    tails = []
    out = np.zeros(len(seq), dtype=np.int64)
    for i, x in enumerate(seq.tolist()):
        pos = bisect_left(tails, x)
        if pos == len(tails):
            tails.append(x)
        else:
            tails[pos] = x
        out[i] = pos + 1
    return out


def lcs_sparse(order, lo, hi):
    order = order.tolist()
    thresh = []
    for start, stop in zip(lo.tolist(), hi.tolist()):
        for idx in range(stop - 1, start - 1, -1):
            j = order[idx]
            pos = bisect_left(thresh, j)
            if pos == len(thresh):
                thresh.append(j)
            else:
                thresh[pos] = j
    return len(thresh)


def lcs_dp(a, b):
    b = b.tolist()
    row = [0] * (len(b) + 1)
    for x in a.tolist():
        diag = 0
        for j, y in enumerate(b, start=1):
            up = row[j]
            if x == y:
                row[j] = diag + 1
            elif row[j - 1] > up:
                row[j] = row[j - 1]
            diag = up
    return row[-1]


def max_weight_planar(w):
    s = w.shape[1]
    tree = [0] * (s + 1)
    best = 0
    for row in w:
        cols = np.flatnonzero(row > 0).tolist()
        pending = []
        for j in cols:
            q = 0
            x = j
            while x > 0:
                if tree[x] > q:
                    q = tree[x]
                x -= x & -x
            pending.append((j + 1, q + int(row[j])))
        for x, v in pending:
            best = max(best, v)
            while x <= s:
                if tree[x] < v:
                    tree[x] = v
                x += x & -x
    return best


def odb_height(m):
    tails = []
    for row in m:
        for j in np.flatnonzero(row)[::-1].tolist():
            pos = bisect_right(tails, j)
            if pos == len(tails):
                tails.append(j)
            else:
                tails[pos] = j
    return len(tails)
