# Compiled inner loops. Every routine here has a numpy twin in _pykernels.py
# that performs the same floating-point operations in the same order, so the
# two backends return bit-identical values.

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdlib cimport free, malloc

cnp.import_array()

BACKEND = "cython"


cdef inline Py_ssize_t _imax(Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    return a if a > b else b


cdef inline Py_ssize_t _imin(Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    return a if a < b else b


cdef double _dtw(
    const double[:, ::1] x,
    const double[:, ::1] y,
    Py_ssize_t radius,
    double offset,
    double abandon,
) noexcept nogil:
    cdef Py_ssize_t l = x.shape[0], n = x.shape[1], m = y.shape[1]
    cdef Py_ssize_t i, j, k, lo, hi
    cdef double c, d, best, rowmin, result
    cdef bint windowed = radius >= 0
    cdef bint can_abandon = abandon < INFINITY
    cdef double *prev = <double *> malloc((m + 1) * sizeof(double))
    cdef double *curr = <double *> malloc((m + 1) * sizeof(double))
    cdef double *tmp

    for j in range(m + 1):
        prev[j] = INFINITY
        curr[j] = INFINITY
    prev[0] = 0.0

    for i in range(1, n + 1):
        if windowed:
            lo = _imax(1, i - radius)
            hi = _imin(m, i + radius)
            for j in range(m + 1):
                curr[j] = INFINITY
        else:
            lo = 1
            hi = m
            curr[0] = INFINITY
        rowmin = INFINITY
        for j in range(lo, hi + 1):
            c = 0.0
            for k in range(l):
                d = x[k, i - 1] - y[k, j - 1]
                c = c + d * d
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if curr[j - 1] < best:
                best = curr[j - 1]
            curr[j] = c + best
            if curr[j] < rowmin:
                rowmin = curr[j]
        if can_abandon and offset + rowmin >= abandon:
            free(prev)
            free(curr)
            return INFINITY
        tmp = prev
        prev = curr
        curr = tmp

    result = prev[m]
    free(prev)
    free(curr)
    if can_abandon and offset + result >= abandon:
        return INFINITY
    return result


def dtw_cost(
    const double[:, ::1] x,
    const double[:, ::1] y,
    Py_ssize_t radius=-1,
    double offset=0.0,
    double abandon=INFINITY,
):
    """Cumulative squared-cost DTW between (l, n) and (l, m) arrays.

    ``radius < 0`` means no band. Returns ``inf`` exactly when ``offset``
    plus the distance reaches ``abandon``; rows whose smallest cumulative
    cost already reaches it stop the computation early.
    """
    cdef double out
    with nogil:
        out = _dtw(x, y, radius, offset, abandon)
    return out


def dtw_subgradient(const double[::1] z, const double[::1] x):
    """DTW cost between ``z`` and ``x`` and its subgradient with respect to ``z``.

    The subgradient follows the optimal warping path found by backtracking
    with preference diagonal, then up, then left.
    """
    cdef Py_ssize_t n = z.shape[0], m = x.shape[0], w = m + 1
    cdef Py_ssize_t i, j
    cdef double c, d, best, diag, up, left
    cdef cnp.ndarray[cnp.float64_t, ndim=1] grad_arr = np.zeros(n)
    cdef double[::1] grad = grad_arr
    cdef double *D = <double *> malloc((n + 1) * w * sizeof(double))
    cdef double cost

    with nogil:
        for j in range((n + 1) * w):
            D[j] = INFINITY
        D[0] = 0.0
        for i in range(1, n + 1):
            for j in range(1, m + 1):
                d = z[i - 1] - x[j - 1]
                c = 0.0 + d * d
                best = D[(i - 1) * w + j - 1]
                if D[(i - 1) * w + j] < best:
                    best = D[(i - 1) * w + j]
                if D[i * w + j - 1] < best:
                    best = D[i * w + j - 1]
                D[i * w + j] = c + best
        cost = D[n * w + m]

        i = n
        j = m
        while True:
            grad[i - 1] = grad[i - 1] + (z[i - 1] - x[j - 1])
            if i == 1 and j == 1:
                break
            diag = D[(i - 1) * w + j - 1]
            up = D[(i - 1) * w + j]
            left = D[i * w + j - 1]
            if diag <= up and diag <= left:
                i -= 1
                j -= 1
            elif up <= left:
                i -= 1
            else:
                j -= 1
        for i in range(n):
            grad[i] = 2.0 * grad[i]
    free(D)
    return cost, grad_arr


def best_split(
    const double[:, ::1] XT,
    const cnp.intp_t[::1] rows,
    const cnp.intp_t[::1] cand,
    const double[::1] u,
    const cnp.intp_t[::1] y,
    Py_ssize_t n_classes,
    Py_ssize_t min_leaf,
):
    """Pick the best randomized split among candidate features.

    For candidate ``f`` the threshold is ``lo + u * (hi - lo)`` where ``lo``
    and ``hi`` are the node-local extremes. Rows with value ``<= threshold``
    go left. The score ``sum(L_c^2)/n_L + sum(R_c^2)/n_R`` is maximised;
    this is equivalent to minimising the weighted Gini impurity. Returns
    ``(position in cand, threshold)`` or ``(-1, nan)``.
    """
    cdef Py_ssize_t r = rows.shape[0], k = cand.shape[0]
    cdef Py_ssize_t a, b, c, f, row, n_left, best_pos = -1
    cdef double lo, hi, t, v, sl, sr, dl, dr, score, best_score = -INFINITY
    cdef double best_t = np.nan
    cdef double *total = <double *> malloc(n_classes * sizeof(double))
    cdef double *left = <double *> malloc(n_classes * sizeof(double))

    with nogil:
        for c in range(n_classes):
            total[c] = 0.0
        for b in range(r):
            total[y[rows[b]]] += 1.0
        for a in range(k):
            f = cand[a]
            lo = XT[f, rows[0]]
            hi = lo
            for b in range(1, r):
                v = XT[f, rows[b]]
                if v < lo:
                    lo = v
                if v > hi:
                    hi = v
            if not hi > lo:
                continue
            t = lo + u[a] * (hi - lo)
            for c in range(n_classes):
                left[c] = 0.0
            n_left = 0
            for b in range(r):
                row = rows[b]
                if XT[f, row] <= t:
                    left[y[row]] += 1.0
                    n_left += 1
            if n_left < min_leaf or r - n_left < min_leaf:
                continue
            sl = 0.0
            sr = 0.0
            for c in range(n_classes):
                dl = left[c]
                dr = total[c] - left[c]
                sl = sl + dl * dl
                sr = sr + dr * dr
            score = sl / <double> n_left + sr / <double> (r - n_left)
            if score > best_score:
                best_score = score
                best_pos = a
                best_t = t
    free(total)
    free(left)
    return best_pos, best_t
