# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot kernels.

Mirrors ``heckelab._pure`` exactly: same entry points, same candidate scan
order, same canonical forms, same tally keys.  Arithmetic uses 64-bit
integers with 128-bit intermediates for modular products; calls that could
overflow this range are delegated back to the pure backend (the dispatch
layer normally routes them away before they get here).
"""

import numpy as np

from . import _pure
from .errors import BudgetError

BACKEND = "compiled"

cdef extern from *:
    ctypedef long long int128 "__int128"

DEF MAXN = 12

ctypedef long long i64


cdef inline i64 ipow(i64 base, int e) nogil:
    cdef i64 out = 1
    cdef int i
    for i in range(e):
        out *= base
    return out


cdef inline int val_i64(i64 x, i64 p) nogil:
    """p-adic valuation of a positive integer."""
    cdef int v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


cdef inline i64 mulmod(i64 a, i64 b, i64 m) nogil:
    return <i64>((<int128>a * <int128>b) % <int128>m)


cdef inline i64 submulmod(i64 a, i64 f, i64 b, i64 m) nogil:
    """(a - f*b) mod m, nonnegative."""
    cdef i64 t = <i64>(((<int128>a) - (<int128>f) * (<int128>b)) % <int128>m)
    if t < 0:
        t += m
    return t


cdef i64 modinv(i64 a, i64 m) except? -1:
    """Inverse of a unit modulo m (extended Euclid; coefficients stay < m)."""
    cdef i64 old_r = a % m, r = m
    cdef i64 old_s = 1, s = 0
    cdef i64 q, tr
    cdef int128 ts
    while r != 0:
        q = old_r // r
        tr = old_r - q * r
        old_r = r
        r = tr
        ts = (<int128>old_s) - (<int128>q) * (<int128>s)
        old_s = s
        s = <i64>ts
    if old_r != 1:
        raise ValueError("not a unit in modular inverse")
    old_s %= m
    if old_s < 0:
        old_s += m
    return old_s


cdef int smith_key(i64 *block, int r, i64 p, i64 mod, i64 *key_out) except -1:
    """Encoded cokernel type of a nonsingular r-by-r block, working mod
    ``mod`` (a power of p strictly above the determinant valuation).

    Classical p-adic Smith elimination: pick the minimum-valuation entry as
    pivot, normalize its unit part away, clear its row and column; the pivot
    valuations (ascending) are the elementary divisor exponents.  The key
    packs them weakly decreasing, 6 bits per part.
    """
    cdef i64 A[MAXN * MAXN]
    cdef int vals[MAXN]
    cdef int i, j, k, t, bi, bj, bv, v
    cdef i64 x, pw, unit, uinv, f
    for i in range(r * r):
        A[i] = block[i] % mod
        if A[i] < 0:
            A[i] += mod
    for k in range(r):
        bi = -1
        bj = -1
        bv = 0
        for i in range(k, r):
            for j in range(k, r):
                x = A[i * r + j]
                if x == 0:
                    continue
                v = val_i64(x, p)
                if bi < 0 or v < bv:
                    bi = i
                    bj = j
                    bv = v
        if bi < 0:
            raise ValueError("block is singular modulo the working precision")
        if bi != k:
            for j in range(r):
                x = A[bi * r + j]
                A[bi * r + j] = A[k * r + j]
                A[k * r + j] = x
        if bj != k:
            for i in range(r):
                x = A[i * r + bj]
                A[i * r + bj] = A[i * r + k]
                A[i * r + k] = x
        vals[k] = bv
        pw = ipow(p, bv)
        unit = A[k * r + k] // pw
        uinv = modinv(unit, mod)
        for j in range(k, r):
            A[k * r + j] = mulmod(A[k * r + j], uinv, mod)
        for i in range(k + 1, r):
            x = A[i * r + k]
            if x == 0:
                continue
            f = x // pw
            for j in range(k, r):
                A[i * r + j] = submulmod(A[i * r + j], f, A[k * r + j], mod)
        # Column clearing only touches row k now (column k is zero below the
        # pivot), so it amounts to zeroing the rest of the pivot row.
        for j in range(k + 1, r):
            A[k * r + j] = 0
    cdef i64 key = 0
    for t in range(r):
        key |= (<i64>vals[r - 1 - t]) << (6 * t)
    key_out[0] = key
    return 0


cdef inline Py_ssize_t bisect_i64(const i64[::1] arr, i64 x) nogil:
    cdef Py_ssize_t lo = 0, hi = arr.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if arr[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def materialize_b(int n, p_obj, b, reach, budget):
    """Compiled twin of ``_pure.materialize_b``; see there for the contract."""
    # The Smith working modulus is p**(sum(b)+1); delegate unless it (and the
    # det bound) fits comfortably in 64 bits.
    if (
        n > MAXN
        or not _pure.int64_safe(_pure.det_bound(n, p_obj, b))
        or int(p_obj) ** (sum(int(x) for x in b) + 1) >= 1 << 62
    ):
        return _pure.materialize_b(n, p_obj, b, reach, budget)
    cdef i64 p = p_obj
    cdef int j, k, off, r, nn = n * n
    cdef list b_list = [int(x) for x in b]
    reach_arrays = [None] + [
        np.asarray(sorted(reach[rr]), dtype=np.int64) for rr in range(1, n + 1)
    ]

    mats = np.zeros((1, nn), dtype=np.int64)
    scanned = 0
    budget_i = int(budget)
    cdef i64[:, ::1] src
    cdef i64[:, ::1] dst
    cdef const i64[::1] allowed
    cdef i64 dims[MAXN]
    cdef i64 cand[MAXN * MAXN]
    cdef i64 block[MAXN * MAXN]
    cdef i64 box_c, code, rem, diag, key, mod
    cdef Py_ssize_t si, s, count, cap, pos
    cdef int ndims, esum

    for j in range(n - 1, -1, -1):
        box = 1
        for k in range(j + 1, n):
            box *= int(p) ** b_list[k]
        s = mats.shape[0]
        scanned += s * box
        if scanned > budget_i:
            raise BudgetError(
                "enumeration budget exceeded",
                scanned=int(scanned),
                budget=int(budget_i),
            )
        if s == 0:
            return np.zeros((0, nn), dtype=np.int64)
        ndims = 0
        esum = b_list[j]
        for k in range(j + 1, n):
            dims[ndims] = ipow(p, b_list[k])
            esum += b_list[k]
            ndims += 1
        mod = ipow(p, esum + 1)
        diag = ipow(p, b_list[j])
        r = n - j
        box_c = <i64>box
        allowed = reach_arrays[r]
        src = mats
        cap = 1024
        out = np.empty((cap, nn), dtype=np.int64)
        dst = out
        count = 0
        for si in range(s):
            for code in range(box_c):
                for k in range(nn):
                    cand[k] = src[si, k]
                cand[j * n + j] = diag
                rem = code
                for off in range(ndims):
                    cand[j * n + j + 1 + off] = rem % dims[off]
                    rem //= dims[off]
                for k in range(r):
                    for off in range(r):
                        block[k * r + off] = cand[(j + k) * n + j + off]
                smith_key(block, r, p, mod, &key)
                pos = bisect_i64(allowed, key)
                if pos < allowed.shape[0] and allowed[pos] == key:
                    if count == cap:
                        cap *= 2
                        bigger = np.empty((cap, nn), dtype=np.int64)
                        bigger[:count] = out[:count]
                        out = bigger
                        dst = out
                    for k in range(nn):
                        dst[count, k] = cand[k]
                    count += 1
        mats = out[:count]
    flat = mats
    if flat.shape[0] > 1:
        flat = flat[np.lexsort(flat.T[::-1])]
    return np.ascontiguousarray(flat)


cdef int hnf_key(i64 *work, int n, i64 p, i64 prec, i64 *out) except -1:
    """Canonical upper-triangular form over Z_p of a flattened matrix already
    reduced mod ``prec``; mirrors the exact reference reduction."""
    cdef int used[MAXN]
    cdef int perm[MAXN]
    cdef int dv[MAXN]
    cdef int col, rr, i, j, pivot, pv, v
    cdef i64 x, pw, unit, uinv, f
    for i in range(n):
        used[i] = 0
    for col in range(n):
        pivot = -1
        pv = 0
        for rr in range(n):
            if used[rr] or work[rr * n + col] == 0:
                continue
            v = val_i64(work[rr * n + col], p)
            if pivot < 0 or v < pv:
                pivot = rr
                pv = v
        if pivot < 0:
            raise ValueError("matrix is singular modulo prec")
        used[pivot] = 1
        perm[col] = pivot
        pw = ipow(p, pv)
        unit = work[pivot * n + col] // pw
        uinv = modinv(unit, prec)
        for j in range(n):
            work[pivot * n + j] = mulmod(work[pivot * n + j], uinv, prec)
        for rr in range(n):
            if rr == pivot or work[rr * n + col] == 0:
                continue
            f = work[rr * n + col] // pw
            for j in range(n):
                work[rr * n + j] = submulmod(work[rr * n + j], f, work[pivot * n + j], prec)
    for i in range(n):
        for j in range(n):
            out[i * n + j] = work[perm[i] * n + j]
    for j in range(n):
        dv[j] = val_i64(out[j * n + j], p)
    for i in range(n):
        for j in range(i + 1, n):
            out[i * n + j] %= ipow(p, dv[j])
        for j in range(i):
            x = out[i * n + j]
            if x != 0 and x % ipow(p, dv[j]) != 0:
                raise ValueError("reduction left a nonzero entry below a pivot")
            out[i * n + j] = 0
        out[i * n + i] = ipow(p, dv[i])
    return 0


def classify_products(xs, ys, int n, p_obj, prec_obj):
    """Compiled twin of ``_pure.classify_products``; see there for the contract."""
    if n > MAXN or not _pure.int64_safe(prec_obj):
        return _pure.classify_products(xs, ys, n, p_obj, prec_obj)
    try:
        a = np.ascontiguousarray(np.asarray(xs, dtype=np.int64).reshape(-1, n * n))
        bm = np.ascontiguousarray(np.asarray(ys, dtype=np.int64).reshape(-1, n * n))
    except (TypeError, OverflowError, ValueError):
        return _pure.classify_products(xs, ys, n, p_obj, prec_obj)
    cdef i64 p = p_obj
    cdef i64 prec = prec_obj
    cdef i64[:, ::1] av = a
    cdef i64[:, ::1] bv = bm
    cdef Py_ssize_t A = av.shape[0], B = bv.shape[0], ai, bi
    cdef int i, j, k, nn = n * n
    cdef i64 x[MAXN * MAXN]
    cdef i64 w[MAXN * MAXN]
    cdef i64 red[MAXN * MAXN]
    cdef i64 acc
    out = {}
    for ai in range(A):
        for k in range(nn):
            x[k] = av[ai, k] % prec
            if x[k] < 0:
                x[k] += prec
        for bi in range(B):
            for i in range(n):
                for j in range(n):
                    acc = 0
                    for k in range(n):
                        acc = (acc + mulmod(x[i * n + k], bv[bi, k * n + j] % prec, prec)) % prec
                    w[i * n + j] = acc
            hnf_key(w, n, p, prec, red)
            key = tuple([red[k] for k in range(nn)])
            if key in out:
                out[key] += 1
            else:
                out[key] = 1
    return out
