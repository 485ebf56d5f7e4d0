# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels.

All loops run without the GIL so the dispatcher can shard index ranges
across threads. Codes are mixed-radix integers, first position most
significant. Every function mirrors one in ``_pure.py``.
"""
from libc.stdlib cimport malloc, free


cdef inline void _digits(long long idx, long long q, int k, long long* out) noexcept nogil:
    cdef int j
    for j in range(k - 1, -1, -1):
        out[j] = idx % q
        idx = idx // q


def project_codes(long long q, const long long[:, ::1] gen,
                  const long long[::1] positions, long long lo, long long hi,
                  long long[::1] out):
    cdef int k = gen.shape[0]
    cdef int p = positions.shape[0]
    cdef long long i, code, sym
    cdef int j, t
    cdef long long* msg = <long long*> malloc(k * sizeof(long long))
    if msg == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(lo, hi):
                _digits(i, q, k, msg)
                code = 0
                for t in range(p):
                    sym = 0
                    for j in range(k):
                        sym = (sym + msg[j] * gen[j, positions[t]]) % q
                    code = code * q + sym
                out[i - lo] = code
    finally:
        free(msg)


def min_weight_range(long long q, const long long[:, ::1] gen, long long lo, long long hi):
    cdef int k = gen.shape[0]
    cdef int n = gen.shape[1]
    cdef long long i, sym
    cdef int j, t, w
    cdef int best = n + 1
    cdef long long* msg = <long long*> malloc(k * sizeof(long long))
    if msg == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(lo, hi):
                if i == 0:
                    continue
                _digits(i, q, k, msg)
                w = 0
                for t in range(n):
                    sym = 0
                    for j in range(k):
                        sym = (sym + msg[j] * gen[j, t]) % q
                    if sym != 0:
                        w += 1
                if w < best:
                    best = w
    finally:
        free(msg)
    return best


def joint_codes(long long q, const long long[:, ::1] gen,
                const long long[::1] deliveries, const long long[::1] public,
                int n_masks, long long lo, long long hi, long long[::1] out):
    cdef int k = gen.shape[0]
    cdef int m = deliveries.shape[0]
    cdef int p = public.shape[0]
    cdef long long mask_states = 1
    cdef long long st, code, sym
    cdef int j, t
    cdef long long* msg = <long long*> malloc((k + n_masks) * sizeof(long long))
    if msg == NULL:
        raise MemoryError()
    for t in range(n_masks):
        mask_states *= q
    try:
        with nogil:
            for st in range(lo, hi):
                _digits(st // mask_states, q, k, msg)
                _digits(st % mask_states, q, n_masks, msg + k)
                code = 0
                for t in range(m):
                    sym = 0
                    for j in range(k):
                        sym = (sym + msg[j] * gen[j, deliveries[t]]) % q
                    code = code * q + (sym + msg[k + t]) % q
                for t in range(p):
                    sym = 0
                    for j in range(k):
                        sym = (sym + msg[j] * gen[j, public[t]]) % q
                    code = code * q + sym
                out[st - lo] = code
    finally:
        free(msg)


def affine_counts(long long q, long long c0, const long long[::1] c,
                  const long long[::1] r0, const long long[:, ::1] R,
                  long long lo, long long hi, long long[::1] counts):
    cdef int u = c.shape[0]
    cdef int r = r0.shape[0]
    cdef long long g, acc
    cdef int i, j
    cdef bint ok
    cdef long long* dig = <long long*> malloc((u + 1) * sizeof(long long))
    if dig == NULL:
        raise MemoryError()
    try:
        with nogil:
            for g in range(lo, hi):
                _digits(g, q, u, dig)
                ok = True
                for i in range(r):
                    acc = r0[i]
                    for j in range(u):
                        acc = (acc + R[i, j] * dig[j]) % q
                    if acc != 0:
                        ok = False
                        break
                if not ok:
                    continue
                acc = c0
                for j in range(u):
                    acc = (acc + c[j] * dig[j]) % q
                counts[acc] += 1
    finally:
        free(dig)


def partition_min(int n, int k):
    """Minimise (sum_C min(|C|, k) - k) / (|P| - 1) over partitions with >= 2 blocks.

    Ties resolve to the lexicographically smallest canonical block list.
    Returns (num, den, best_rgs, partitions_seen, minimisers).
    """
    if n < 2:
        return None
    cdef int* a = <int*> malloc(n * sizeof(int))
    cdef int* mx = <int*> malloc(n * sizeof(int))
    cdef int* size = <int*> malloc(n * sizeof(int))
    cdef int* best = <int*> malloc(n * sizeof(int))
    cdef int* flat = <int*> malloc(2 * n * sizeof(int))
    cdef int* bflat = <int*> malloc(2 * n * sizeof(int))
    cdef long long seen = 0, ties = 0
    cdef long long bnum = -1, bden = 1, num, den, lhs, rhs
    cdef int i, j, b, p, pos, cmp
    if not (a and mx and size and best and flat and bflat):
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                a[i] = 0
                mx[i] = 0
            while True:
                p = 0
                for i in range(n):
                    if a[i] + 1 > p:
                        p = a[i] + 1
                if p >= 2:
                    seen += 1
                    for b in range(p):
                        size[b] = 0
                    for i in range(n):
                        size[a[i]] += 1
                    num = -k
                    for b in range(p):
                        num += size[b] if size[b] < k else k
                    den = p - 1
                    lhs = num * bden
                    rhs = bnum * den
                    cmp = 0
                    if bnum < 0 or lhs < rhs:
                        cmp = -1
                    elif lhs == rhs:
                        pos = 0
                        for b in range(p):
                            for i in range(n):
                                if a[i] == b:
                                    flat[pos] = i + 1
                                    pos += 1
                            flat[pos] = 0
                            pos += 1
                        ties += 1
                        for i in range(pos):
                            if flat[i] != bflat[i]:
                                cmp = -1 if flat[i] < bflat[i] else 1
                                break
                    if cmp < 0:
                        if bnum < 0 or lhs < rhs:
                            ties = 1
                        bnum = num
                        bden = den
                        for i in range(n):
                            best[i] = a[i]
                        pos = 0
                        for b in range(p):
                            for i in range(n):
                                if a[i] == b:
                                    bflat[pos] = i + 1
                                    pos += 1
                            bflat[pos] = 0
                            pos += 1
                # next restricted growth string
                i = n - 1
                while i >= 1 and a[i] == mx[i] + 1:
                    i -= 1
                if i == 0:
                    break
                a[i] += 1
                for j in range(i + 1, n):
                    a[j] = 0
                    mx[j] = mx[j - 1] if mx[j - 1] > a[j - 1] else a[j - 1]
        rgs = [best[i] for i in range(n)]
        return bnum, bden, rgs, seen, ties
    finally:
        free(a)
        free(mx)
        free(size)
        free(best)
        free(flat)
        free(bflat)
