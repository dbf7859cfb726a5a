# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels in ``_kernels_py``; identical API."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64

cdef extern from *:
    bint __builtin_mul_overflow(long long a, long long b, long long *res) nogil
    bint __builtin_add_overflow(long long a, long long b, long long *res) nogil


def compositions(long total, long L, long maxpart):
    if total < 0 or total > maxpart * L or L <= 0:
        return np.zeros((0, max(L, 0)), dtype=np.int64)
    cdef list out = []
    cdef i64[:] buf = np.zeros(L, dtype=np.int64)
    cdef i64[:] cap = np.zeros(L + 1, dtype=np.int64)
    cdef long m, k
    for m in range(L):
        cap[m] = maxpart * (L - m - 1)
    # iterative odometer over the lexicographic tree
    cdef i64[:] rest = np.zeros(L + 1, dtype=np.int64)
    rest[0] = total
    m = 0
    buf[0] = max(0, total - cap[0]) - 1
    while m >= 0:
        buf[m] += 1
        if buf[m] > min(maxpart, rest[m]):
            m -= 1
            continue
        if m == L - 1:
            if buf[m] == rest[m]:
                out.append([buf[k] for k in range(L)])
            continue
        rest[m + 1] = rest[m] - buf[m]
        m += 1
        buf[m] = max(0, rest[m] - cap[m]) - 1
    return np.array(out, dtype=np.int64).reshape(len(out), L)


def divided_power_entries(long N, const i64[:, :] digits, const i64[:, :] comps, const i64[:, :, :] gauss,
                          bint raising, bint suffix, const i64[:] weights):
    cdef Py_ssize_t S = digits.shape[0], L = digits.shape[1], C = comps.shape[0]
    # first pass: count valid pairs
    cdef Py_ssize_t st, c, m, a, b, count = 0
    cdef long v, nv
    cdef bint ok
    for st in range(S):
        for c in range(C):
            ok = True
            for m in range(L):
                v = digits[st, m]
                nv = v + comps[c, m] if raising else v - comps[c, m]
                if nv < 0 or nv >= N:
                    ok = False
                    break
            if ok:
                count += 1
    cols_np = np.empty(count, dtype=np.int64)
    ranks_np = np.empty(count, dtype=np.int64)
    cyc_np = np.zeros((count, N), dtype=np.int64)
    cdef i64[:] cols = cols_np
    cdef i64[:] ranks = ranks_np
    cdef i64[:, :] cyc = cyc_np
    cdef i64[:] s = np.zeros(L, dtype=np.int64)
    cdef i64[:] acc = np.zeros(N, dtype=np.int64)
    cdef i64[:] nxt = np.zeros(N, dtype=np.int64)
    cdef long long phase, gw, rk, zb, tmp, prod
    cdef Py_ssize_t pos = 0
    for c in range(C):
        if suffix:
            s[L - 1] = 0
            for m in range(L - 2, -1, -1):
                s[m] = s[m + 1] + comps[c, m + 1]
        else:
            s[0] = 0
            for m in range(1, L):
                s[m] = s[m - 1] + comps[c, m - 1]
        gw = 0
        for m in range(L):
            gw += weights[m] * comps[c, m]
        for st in range(S):
            ok = True
            rk = 0
            phase = gw
            for m in range(L):
                v = digits[st, m]
                nv = v + comps[c, m] if raising else v - comps[c, m]
                if nv < 0 or nv >= N:
                    ok = False
                    break
                rk = rk * N + nv
                zb = v if raising else nv
                phase += zb * s[m]
            if not ok:
                continue
            for a in range(N):
                acc[a] = 0
            acc[0] = 1
            for m in range(L):
                if comps[c, m] == 0:
                    continue
                for a in range(N):
                    nxt[a] = 0
                for a in range(N):
                    if acc[a] == 0:
                        continue
                    for b in range(N):
                        if gauss[digits[st, m], comps[c, m], b] == 0:
                            continue
                        if __builtin_mul_overflow(acc[a], gauss[digits[st, m], comps[c, m], b], &prod):
                            raise OverflowError("coefficient overflow in divided power")
                        if __builtin_add_overflow(nxt[(a + b) % N], prod, &tmp):
                            raise OverflowError("coefficient overflow in divided power")
                        nxt[(a + b) % N] = tmp
                for a in range(N):
                    acc[a] = nxt[a]
            phase %= N
            for a in range(N):
                cyc[pos, (a + phase) % N] = acc[a]
            cols[pos] = st
            ranks[pos] = rk
            pos += 1
    return cols_np, ranks_np, cyc_np


ctypedef fused index_t:
    cnp.int32_t
    cnp.int64_t


def csr_matvec_checked(const index_t[:] indptr, const index_t[:] idx, const i64[:] data, const i64[:] x):
    cdef Py_ssize_t n_rows = indptr.shape[0] - 1, i, k
    y_np = np.zeros(n_rows, dtype=np.int64)
    cdef i64[:] y = y_np
    cdef long long acc, prod, tmp
    with nogil:
        for i in range(n_rows):
            acc = 0
            for k in range(indptr[i], indptr[i + 1]):
                if __builtin_mul_overflow(data[k], x[idx[k]], &prod):
                    with gil:
                        raise OverflowError("int64 matvec overflow")
                if __builtin_add_overflow(acc, prod, &tmp):
                    with gil:
                        raise OverflowError("int64 matvec overflow")
                acc = tmp
            y[i] = acc
    return y_np
