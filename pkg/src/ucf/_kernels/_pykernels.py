"""Pure numpy implementations of the compiled kernels.

DTW is evaluated along anti-diagonals of the cumulative-cost matrix, which
keeps the per-cell arithmetic (``cost + min(three neighbours)``) identical to
the row-by-row compiled loop, so both backends agree bit-for-bit.
"""

import numpy as np

BACKEND = "numpy"


def _cost_matrix(x, y):
    # Padded (n+1, m+1) local cost, summed channel by channel from 0.0.
    n, m = x.shape[1], y.shape[1]
    cost = np.zeros((n + 1, m + 1))
    inner = cost[1:, 1:]
    for k in range(x.shape[0]):
        d = x[k][:, None] - y[k][None, :]
        inner += d * d
    return cost


def _band_mask(n, m, radius):
    i = np.arange(1, n + 1)[:, None]
    j = np.arange(1, m + 1)[None, :]
    return np.abs(i - j) > radius


def _accumulate(cost, n, m, offset=0.0, abandon=np.inf):
    """Fill the cumulative matrix in place of a flat buffer; None if abandoned."""
    w = m + 1
    D = np.full((n + 1) * w, np.inf)
    D[0] = 0.0
    C = cost.ravel()
    can_abandon = abandon < np.inf
    prev_min = np.inf
    for s in range(2, n + m + 1):
        i0 = max(1, s - m)
        i1 = min(n, s - 1)
        # flat index of (i, s - i) is i * m + s; neighbours sit at fixed offsets
        start = i0 * m + s
        stop = i1 * m + s + 1
        cell = slice(start, stop, m)
        best = np.minimum(D[start - w - 1:stop - w - 1:m], D[start - w:stop - w:m])
        np.minimum(best, D[start - 1:stop - 1:m], out=best)
        D[cell] = C[cell] + best
        if can_abandon:
            cur_min = D[cell].min()
            # every warping path visits diagonal s or s - 1
            if offset + min(cur_min, prev_min) >= abandon:
                return None
            prev_min = cur_min
    return D


def dtw_cost(x, y, radius=-1, offset=0.0, abandon=np.inf):
    n, m = x.shape[1], y.shape[1]
    cost = _cost_matrix(x, y)
    if radius >= 0:
        cost[1:, 1:][_band_mask(n, m, radius)] = np.inf
    D = _accumulate(cost, n, m, offset, abandon)
    if D is None:
        return np.inf
    result = float(D[n * (m + 1) + m])
    if abandon < np.inf and offset + result >= abandon:
        return np.inf
    return result


def dtw_subgradient(z, x):
    n, m = z.shape[0], x.shape[0]
    w = m + 1
    cost = _cost_matrix(z[None, :], x[None, :])
    D = _accumulate(cost, n, m)
    i, j = n, m
    path_i, path_j = [], []
    while True:
        path_i.append(i - 1)
        path_j.append(j - 1)
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
    pi = np.asarray(path_i)
    pj = np.asarray(path_j)
    grad = np.zeros(n)
    np.add.at(grad, pi, z[pi] - x[pj])
    return float(D[n * w + m]), 2.0 * grad


def best_split(XT, rows, cand, u, y, n_classes, min_leaf):
    sub = XT[cand][:, rows]
    lo = sub.min(axis=1)
    hi = sub.max(axis=1)
    t = lo + u * (hi - lo)
    goes_left = sub <= t[:, None]
    onehot = np.zeros((rows.shape[0], n_classes))
    onehot[np.arange(rows.shape[0]), y[rows]] = 1.0
    left = goes_left.astype(np.float64) @ onehot
    right = onehot.sum(axis=0)[None, :] - left
    n_left = goes_left.sum(axis=1)
    n_right = rows.shape[0] - n_left
    valid = (hi > lo) & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return -1, float("nan")
    with np.errstate(divide="ignore", invalid="ignore"):
        score = (left * left).sum(axis=1) / n_left + (right * right).sum(axis=1) / n_right
    score = np.where(valid, score, -np.inf)
    pos = int(np.argmax(score))
    return pos, float(t[pos])
