# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-replication kernels: quartiles, medcouple, fences, counts.

Mirrors :mod:`skewbox._kernels_py` operation for operation so both backends
classify the same points.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs, floor, pow, sqrt
from libc.stdlib cimport free, malloc, qsort

cnp.import_array()

cdef enum:
    TUKEY, KIMBER, HUBERT, ADIL, BABURA, WALKER, JUNSAWANG

cdef enum:
    MC_KERNEL, MC_SPLIT

cdef double SKEW_CAP = 3.5


cdef int _cmp(const void* a, const void* b) noexcept nogil:
    cdef double x = (<double*>a)[0]
    cdef double y = (<double*>b)[0]
    return (x > y) - (x < y)


cdef inline double _type7(const double* xs, Py_ssize_t n, double prob) noexcept nogil:
    cdef double h = (n - 1) * prob
    cdef Py_ssize_t lo = <Py_ssize_t>floor(h)
    cdef double frac = h - lo
    cdef double a
    if frac == 0.0 or lo >= n - 1:
        return xs[lo if lo < n - 1 else n - 1]
    a = xs[lo]
    return a + frac * (xs[lo + 1] - a)


cdef double _select(double* v, Py_ssize_t m, Py_ssize_t k) noexcept nogil:
    # quickselect; leaves v[k] in sorted position and v[:k] <= v[k]
    cdef Py_ssize_t lo = 0, hi = m - 1, i, j
    cdef double pivot, tmp
    while hi > lo:
        pivot = v[(lo + hi) // 2]
        i = lo
        j = hi
        while i <= j:
            while v[i] < pivot:
                i += 1
            while v[j] > pivot:
                j -= 1
            if i <= j:
                tmp = v[i]; v[i] = v[j]; v[j] = tmp
                i += 1
                j -= 1
        if k <= j:
            hi = j
        elif k >= i:
            lo = i
        else:
            break
    return v[k]


cdef double _kernel_median(const double* xs, Py_ssize_t n, double med, double* work) noexcept nogil:
    # xs sorted; lower half = xs[:nl] (x <= med), upper half = xs[n-nu:] (x >= med)
    cdef Py_ssize_t nl = 0, nu = 0, t = 0, a, b, m, mid, ii, jj
    cdef double xi, xj, below, top
    while nl < n and xs[nl] <= med:
        nl += 1
    while nu < n and xs[n - 1 - nu] >= med:
        nu += 1
    for a in range(nl):
        if xs[a] == med:
            t += 1
    m = 0
    for b in range(nu):
        xj = xs[n - nu + b]
        for a in range(nl):
            xi = xs[a]
            if xi == med and xj == med:
                # tie block: upper index b (0..t-1), lower index a - (nl - t)
                ii = b + 1
                jj = a - (nl - t) + 1
                work[m] = <double>((ii + jj - 1 > t) - (ii + jj - 1 < t))
            else:
                work[m] = ((xj - med) - (med - xi)) / (xj - xi)
            m += 1
    mid = m // 2
    top = _select(work, m, mid)
    if m % 2:
        return top
    below = work[0]
    for a in range(1, mid):
        if work[a] > below:
            below = work[a]
    return (below + top) / 2


def medcouple_sorted(const double[::1] xs):
    """Medcouple of an already sorted, non-constant sample (n >= 3)."""
    cdef Py_ssize_t n = xs.shape[0]
    if n < 3:
        raise ValueError("too few observations")
    if xs[0] == xs[n - 1]:
        raise ValueError("degenerate sample: zero spread")
    cdef double* work = <double*>malloc(n * n * sizeof(double))
    if work == NULL:
        raise MemoryError()
    cdef double out
    try:
        out = _kernel_median(&xs[0], n, _type7(&xs[0], n, 0.5), work)
    finally:
        free(work)
    return out


cdef int _fences(double* xs, Py_ssize_t n, int method, double k, double eps,
                 double cap, int mc_estimator, double* work,
                 double* lower, double* upper) noexcept nogil:
    """Fences on sorted ``xs``; returns 0 on success, 1 for a degenerate sample."""
    cdef double q1 = _type7(xs, n, 0.25)
    cdef double q2 = _type7(xs, n, 0.5)
    cdef double q3 = _type7(xs, n, 0.75)
    cdef double iqr = q3 - q1
    cdef double spread = k * iqr
    cdef double lo_f = 1.0, hi_f = 1.0, mc = 0.0, bc, b, sk, ratio
    cdef double mean, d, m2, m3, ma, mb
    cdef Py_ssize_t i, na, nb
    if method == TUKEY:
        lower[0] = q1 - spread * 1.0
        upper[0] = q3 + spread * 1.0
        return 0
    if method == KIMBER:
        lower[0] = q1 - (2.0 * k) * (q2 - q1)
        upper[0] = q3 + (2.0 * k) * (q3 - q2)
        return 0
    if not iqr > 0:
        return 1
    if method == HUBERT or method == ADIL:
        if mc_estimator == MC_KERNEL:
            mc = _kernel_median(xs, n, q2, work)
        else:
            # points strictly above / below the median are contiguous in xs
            nb = 0
            while nb < n and xs[nb] < q2:
                nb += 1
            na = 0
            while na < n and xs[n - 1 - na] > q2:
                na += 1
            if na == 0 or nb == 0:
                return 1
            ma = _type7(xs + (n - na), na, 0.5)
            mb = _type7(xs, nb, 0.5)
            mc = (ma - mb) / iqr
        if method == HUBERT:
            lo_f = exp(-3.0 * mc)
            hi_f = exp(3.0 * mc)
        else:
            mean = 0.0
            for i in range(n):
                mean += xs[i]
            mean /= n
            m2 = 0.0
            m3 = 0.0
            for i in range(n):
                d = xs[i] - mean
                m2 += d * d
                m3 += d * d * d
            m2 /= n
            m3 /= n
            if not m2 > 0:
                return 1
            sk = m3 / pow(m2, 1.5) * sqrt(<double>n * (n - 1)) / (n - 2)
            if sk > SKEW_CAP:
                sk = SKEW_CAP
            elif sk < -SKEW_CAP:
                sk = -SKEW_CAP
            lo_f = exp(sk * fabs(mc))
            hi_f = lo_f
    else:
        bc = (q3 + q1 - 2.0 * q2) / iqr
        if bc > 1.0:
            bc = 1.0
        elif bc < -1.0:
            bc = -1.0
        if method == BABURA:
            lo_f = exp(6.0 * bc)
            hi_f = lo_f
        elif method == WALKER:
            b = bc
            if b > 1.0 - eps:
                b = 1.0 - eps
            if b < -1.0 + eps:
                b = -1.0 + eps
            lo_f = (1.0 - b) / (1.0 + b)
            hi_f = (1.0 + b) / (1.0 - b)
            if lo_f > cap:
                lo_f = cap
            if hi_f > cap:
                hi_f = cap
        else:
            if q3 - q2 > 0:
                ratio = (q2 - q1) / (q3 - q2)
                if ratio > cap:
                    ratio = cap
            else:
                ratio = cap
            lo_f = exp(bc * ratio)
            hi_f = lo_f
    lower[0] = q1 - spread * lo_f
    upper[0] = q3 + spread * hi_f
    return 0


def batch_counts(const double[:, ::1] samples, planted, int method, double k,
                 double eps, double cap, int mc_estimator):
    """Per-row outlier counts.

    Returns ``(flagged, missed)`` int64 arrays; ``flagged`` is -1 where the
    row is degenerate for ``method``. ``missed`` counts rows' planted points
    that were not flagged (zero when ``planted`` is None).
    """
    cdef Py_ssize_t reps = samples.shape[0], n = samples.shape[1], r, i
    if n < 4:
        raise ValueError("too few observations for fence method")
    flagged = np.zeros(reps, dtype=np.int64)
    missed = np.zeros(reps, dtype=np.int64)
    cdef cnp.int64_t[::1] fl = flagged
    cdef cnp.int64_t[::1] ms = missed
    cdef const unsigned char[:, ::1] pl
    cdef bint has_planted = planted is not None
    if has_planted:
        pl = np.ascontiguousarray(planted, dtype=np.uint8)
        if pl.shape[0] != reps or pl.shape[1] != n:
            raise ValueError("planted mask shape mismatch")
    cdef double* xs = <double*>malloc(n * sizeof(double))
    cdef double* work = <double*>malloc(n * n * sizeof(double))
    cdef double lo, hi, v
    cdef long nf, nm
    cdef int status
    if xs == NULL or work == NULL:
        free(xs)
        free(work)
        raise MemoryError()
    try:
        with nogil:
            for r in range(reps):
                for i in range(n):
                    xs[i] = samples[r, i]
                qsort(xs, n, sizeof(double), _cmp)
                status = _fences(xs, n, method, k, eps, cap, mc_estimator, work, &lo, &hi)
                if status != 0:
                    fl[r] = -1
                    continue
                nf = 0
                nm = 0
                for i in range(n):
                    v = samples[r, i]
                    if v < lo or v > hi:
                        nf += 1
                    elif has_planted and pl[r, i]:
                        nm += 1
                fl[r] = nf
                ms[r] = nm
    finally:
        free(xs)
        free(work)
    return flagged, missed
