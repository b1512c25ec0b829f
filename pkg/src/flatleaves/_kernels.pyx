# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: modular orbit ranks and coset membership masks."""

import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t i64


cdef inline i64 _pmod(i64 x, i64 p) nogil:
    x = x % p
    return x + p if x < 0 else x


cdef i64 _inv_mod(i64 a, i64 p) nogil:
    cdef i64 t = 0, nt = 1, r = p, nr = a, q, tmp
    while nr != 0:
        q = r // nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    return _pmod(t, p)


def orbit_ranks(i64[:, :, ::1] mats, i64[:, ::1] vecs, i64 p):
    """Rank mod p of the matrix with columns ``A v`` (A over ``mats``), per row v of ``vecs``."""
    cdef Py_ssize_t h = mats.shape[0], k = mats.shape[1], nv = vecs.shape[0]
    cdef Py_ssize_t a, i, j, t, col, row, piv
    cdef i64 s, inv, f, tmp
    out = np.zeros(nv, dtype=np.int64)
    cdef i64[::1] res = out
    # work[i, a]: row i (coordinate) of column a (orbit image)
    work_arr = np.zeros((k, h), dtype=np.int64)
    cdef i64[:, ::1] w = work_arr
    with nogil:
        for t in range(nv):
            for a in range(h):
                for i in range(k):
                    s = 0
                    for j in range(k):
                        s += mats[a, i, j] * vecs[t, j]
                    w[i, a] = _pmod(s, p)
            row = 0
            for col in range(h):
                if row == k:
                    break
                piv = -1
                for i in range(row, k):
                    if w[i, col] != 0:
                        piv = i
                        break
                if piv < 0:
                    continue
                if piv != row:
                    for j in range(col, h):
                        tmp = w[row, j]
                        w[row, j] = w[piv, j]
                        w[piv, j] = tmp
                inv = _inv_mod(w[row, col], p)
                for i in range(row + 1, k):
                    if w[i, col] != 0:
                        f = (w[i, col] * inv) % p
                        for j in range(col, h):
                            w[i, j] = _pmod(w[i, j] - f * w[row, j] % p, p)
                row += 1
            res[t] = row
    return out


def coset_masks(i64[:, :, ::1] rows, i64[:, ::1] offsets, i64[:, ::1] points, i64 modulus):
    """mask[t, a] = 1 iff ``rows[a] @ points[t] + offsets[a]`` vanishes mod ``modulus``."""
    cdef Py_ssize_t h = rows.shape[0], r = rows.shape[1], n = rows.shape[2], npts = points.shape[0]
    cdef Py_ssize_t t, a, i, j
    cdef i64 s
    cdef bint ok
    out = np.zeros((npts, h), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] m = out
    with nogil:
        for t in range(npts):
            for a in range(h):
                ok = True
                for i in range(r):
                    s = offsets[a, i]
                    for j in range(n):
                        s += rows[a, i, j] * points[t, j]
                    if s % modulus != 0:
                        ok = False
                        break
                m[t, a] = ok
    return out
