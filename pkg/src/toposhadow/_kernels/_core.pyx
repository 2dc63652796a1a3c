# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=False
"""Compiled twins of the pure numpy kernels in ``_pure``.

Bit-identical by construction: float accumulation follows the same
per-element operation order, and the geometric kernels are exact integer
arithmetic.  Any semantic change here must land in ``_pure`` too.
"""

import numpy as np

cimport numpy as cnp

from ..errors import TriangleCapError

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.int32_t i32
ctypedef cnp.float64_t f64


def correlate1d_replicate(img, weights, int axis):
    """Symmetric 1D correlation with clamp-to-edge borders, evaluated in
    center-deviation form (see the pure twin for the exact formula)."""
    cdef cnp.ndarray[f64, ndim=2] x = np.ascontiguousarray(img, dtype=np.float64)
    cdef cnp.ndarray[f64, ndim=1] w = np.asarray(weights, dtype=np.float64)
    cdef int radius = (w.shape[0] - 1) // 2
    cdef cnp.ndarray[f64, ndim=2] out = np.empty_like(x)
    cdef Py_ssize_t h = x.shape[0], ww = x.shape[1]
    cdef Py_ssize_t r, c, lo, hi
    cdef int k
    cdef f64 acc, center, wk
    if radius == 0:
        out[...] = x
        return out
    if axis == 0:
        for r in range(h):
            for c in range(ww):
                center = x[r, c]
                acc = 0.0
                for k in range(1, radius + 1):
                    lo = r - k
                    if lo < 0:
                        lo = 0
                    hi = r + k
                    if hi > h - 1:
                        hi = h - 1
                    wk = w[radius + k]
                    acc = acc + wk * ((x[lo, c] - center) + (x[hi, c] - center))
                out[r, c] = center + acc
    else:
        for r in range(h):
            for c in range(ww):
                center = x[r, c]
                acc = 0.0
                for k in range(1, radius + 1):
                    lo = c - k
                    if lo < 0:
                        lo = 0
                    hi = c + k
                    if hi > ww - 1:
                        hi = ww - 1
                    wk = w[radius + k]
                    acc = acc + wk * ((x[r, lo] - center) + (x[r, hi] - center))
                out[r, c] = center + acc
    return out


def thin_points(points, spacing):
    """Greedy row-major thinning: keep a candidate iff no already-kept
    point lies within the candidate's own spacing threshold (inclusive)."""
    cdef cnp.ndarray[i64, ndim=2] pts = np.ascontiguousarray(points, dtype=np.int64)
    cdef cnp.ndarray[f64, ndim=1] lam = np.ascontiguousarray(spacing, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    cdef double cell = float(np.max(lam))
    if cell <= 0.0:
        return np.arange(n, dtype=np.int64)
    cdef i64 max_r = 0, max_c = 0
    cdef Py_ssize_t i
    for i in range(n):
        if pts[i, 0] > max_r:
            max_r = pts[i, 0]
        if pts[i, 1] > max_c:
            max_c = pts[i, 1]
    cdef Py_ssize_t gh = <Py_ssize_t>(max_r / cell) + 1
    cdef Py_ssize_t gw = <Py_ssize_t>(max_c / cell) + 1
    # per-cell chains: head[cell] -> most recent kept index, nxt -> previous
    cdef cnp.ndarray[i64, ndim=1] head = np.full(gh * gw, -1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] nxt = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] kept = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t n_kept = 0
    cdef i64 r, c, pr, pc, dy, dx
    cdef Py_ssize_t gr, gc, ar, ac, j
    cdef double limit, limit_sq
    cdef bint ok
    for i in range(n):
        r = pts[i, 0]
        c = pts[i, 1]
        limit = lam[i]
        limit_sq = limit * limit
        gr = <Py_ssize_t>(r / cell)
        gc = <Py_ssize_t>(c / cell)
        ok = True
        for ar in range(gr - 1, gr + 2):
            if ar < 0 or ar >= gh:
                continue
            for ac in range(gc - 1, gc + 2):
                if ac < 0 or ac >= gw:
                    continue
                j = head[ar * gw + ac]
                while j >= 0:
                    pr = pts[j, 0]
                    pc = pts[j, 1]
                    dy = r - pr
                    dx = c - pc
                    if <double>(dy * dy + dx * dx) <= limit_sq:
                        ok = False
                        break
                    j = nxt[j]
                if not ok:
                    break
            if not ok:
                break
        if ok:
            kept[n_kept] = i
            n_kept += 1
            nxt[i] = head[gr * gw + gc]
            head[gr * gw + gc] = i
    return kept[:n_kept].copy()


def rips_triangles(points, double epsilon, long long cap):
    """All index triples with pairwise distance <= epsilon, i < j < k,
    emitted in lexicographic order via a uniform grid of cell size epsilon."""
    cdef cnp.ndarray[i64, ndim=2] pts = np.ascontiguousarray(points, dtype=np.int64)
    cdef Py_ssize_t n = pts.shape[0]
    if n < 3:
        return np.zeros((0, 3), dtype=np.int32)
    cdef double eps_sq = float(epsilon) * float(epsilon)
    # The grid only prunes candidate pairs; any cell size >= the adjacency
    # radius is correct, so degenerate epsilons just use a unit cell.
    cdef double cell = abs(epsilon)
    if cell == 0.0:
        cell = 1.0
    cdef i64 max_r = 0, max_c = 0
    cdef Py_ssize_t i
    for i in range(n):
        if pts[i, 0] > max_r:
            max_r = pts[i, 0]
        if pts[i, 1] > max_c:
            max_c = pts[i, 1]
    cdef Py_ssize_t gh = <Py_ssize_t>(max_r / cell) + 1
    cdef Py_ssize_t gw = <Py_ssize_t>(max_c / cell) + 1
    cdef cnp.ndarray[i64, ndim=1] head = np.full(gh * gw, -1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] nxt = np.full(n, -1, dtype=np.int64)
    cdef Py_ssize_t gr, gc
    for i in range(n):
        gr = <Py_ssize_t>(pts[i, 0] / cell)
        gc = <Py_ssize_t>(pts[i, 1] / cell)
        nxt[i] = head[gr * gw + gc]
        head[gr * gw + gc] = i
    cdef cnp.ndarray[i64, ndim=1] nbrs = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t n_nbrs, a, b
    cdef i64 j, k, dy, dx
    cdef Py_ssize_t ar, ac
    cdef Py_ssize_t buf_cap = 4096
    cdef cnp.ndarray[i32, ndim=2] buf = np.empty((buf_cap, 3), dtype=np.int32)
    cdef Py_ssize_t count = 0
    for i in range(n):
        gr = <Py_ssize_t>(pts[i, 0] / cell)
        gc = <Py_ssize_t>(pts[i, 1] / cell)
        n_nbrs = 0
        for ar in range(gr - 1, gr + 2):
            if ar < 0 or ar >= gh:
                continue
            for ac in range(gc - 1, gc + 2):
                if ac < 0 or ac >= gw:
                    continue
                j = head[ar * gw + ac]
                while j >= 0:
                    if j > i:
                        dy = pts[i, 0] - pts[j, 0]
                        dx = pts[i, 1] - pts[j, 1]
                        if <double>(dy * dy + dx * dx) <= eps_sq:
                            nbrs[n_nbrs] = j
                            n_nbrs += 1
                    j = nxt[j]
        if n_nbrs < 2:
            continue
        nbrs[:n_nbrs].sort()
        for a in range(n_nbrs - 1):
            j = nbrs[a]
            for b in range(a + 1, n_nbrs):
                k = nbrs[b]
                dy = pts[j, 0] - pts[k, 0]
                dx = pts[j, 1] - pts[k, 1]
                if <double>(dy * dy + dx * dx) <= eps_sq:
                    if count >= cap:
                        raise TriangleCapError(cap)
                    if count >= buf_cap:
                        buf_cap *= 2
                        buf = np.concatenate(
                            [buf, np.empty((buf_cap - count, 3), dtype=np.int32)]
                        )
                    buf[count, 0] = <i32>i
                    buf[count, 1] = <i32>j
                    buf[count, 2] = <i32>k
                    count += 1
    return buf[:count].copy()


def occurrence_counts(points, triangles, Py_ssize_t height, Py_ssize_t width):
    """Per-pixel count of closed triangles containing the pixel center;
    exact integer scanline rasterization accumulated via difference rows."""
    cdef cnp.ndarray[i64, ndim=2] pts = np.ascontiguousarray(points, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=2] tris = np.ascontiguousarray(triangles, dtype=np.int64)
    cdef cnp.ndarray[i32, ndim=2] diff = np.zeros((height, width + 1), dtype=np.int32)
    cdef Py_ssize_t m = tris.shape[0]
    cdef Py_ssize_t t, e
    cdef i64 r0[3]
    cdef i64 c0[3]
    cdef i64 r1, c1, r2, c2, rmin, rmax, r
    cdef i64 num, den, nmin, dmin, nmax, dmax, cmin, cmax, cc
    cdef int q
    cdef bint have
    for t in range(m):
        for e in range(3):
            r0[e] = pts[tris[t, e], 0]
            c0[e] = pts[tris[t, e], 1]
        rmin = min(r0[0], min(r0[1], r0[2]))
        rmax = max(r0[0], max(r0[1], r0[2]))
        for r in range(rmin, rmax + 1):
            have = False
            nmin = dmin = nmax = dmax = 1
            for e in range(3):
                r1 = r0[e]
                c1 = c0[e]
                r2 = r0[(e + 1) % 3]
                c2 = c0[(e + 1) % 3]
                if r1 == r2:
                    if r1 != r:
                        continue
                    for q in range(2):
                        cc = c1 if q == 0 else c2
                        if not have:
                            nmin = nmax = cc
                            dmin = dmax = 1
                            have = True
                        else:
                            if cc * dmin < nmin:
                                nmin = cc
                                dmin = 1
                            if cc * dmax > nmax:
                                nmax = cc
                                dmax = 1
                else:
                    if (r1 < r2 and (r < r1 or r > r2)) or (r2 < r1 and (r < r2 or r > r1)):
                        continue
                    den = r2 - r1
                    num = c1 * den + (c2 - c1) * (r - r1)
                    if den < 0:
                        num = -num
                        den = -den
                    if not have:
                        nmin = nmax = num
                        dmin = dmax = den
                        have = True
                    else:
                        if num * dmin < nmin * den:
                            nmin = num
                            dmin = den
                        if num * dmax > nmax * den:
                            nmax = num
                            dmax = den
            if not have:
                continue
            cmin = -((-nmin) // dmin)
            cmax = nmax // dmax
            if cmin > cmax:
                continue
            diff[r, cmin] += 1
            diff[r, cmax + 1] -= 1
    return np.cumsum(diff[:, :width], axis=1, dtype=np.int32)
