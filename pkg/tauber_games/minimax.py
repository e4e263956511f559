"""
Value and optimal mixed strategies of a finite matrix game, the
maximiser choosing rows.

The matrix is shifted so that every entry is at least 1, which makes the
value positive; then max sum(w) s.t. A w <= 1, w >= 0 is solved by a
dense tableau simplex with Bland's rule. With z the optimum,
value = 1/z - shift, y = w/z, and x is read off the slack reduced costs.
"""
import numpy as np

from .consts import exact_tol, pivot_tol
from .errors import BadMatrix, NumericalFailure

__all__ = ["matrix_value", "guarantees"]


def _onehot(k, size):
    e = np.zeros(size)
    e[k] = 1.0
    return e


def guarantees(M, x, y):
    """(min over columns of x'M, max over rows of My)"""
    M = np.asarray(M, dtype=float)
    return float(np.min(x @ M)), float(np.max(M @ y))


def _simplex(A):
    """
    Bland's rule simplex for max 1'w s.t. A w <= 1, w >= 0 with A > 0.
    Returns (z, w, p), p being the optimal dual.
    """
    m, n = A.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = 1.0
    T[m, :n] = 1.0
    basis = list(range(n, n + m))
    cap = 10 * (m + n) ** 2
    for _ in range(cap):
        entering = np.nonzero(T[m, :-1] > pivot_tol)[0]
        if entering.size == 0:
            break
        j = int(entering[0])
        col = T[:m, j]
        rows = np.nonzero(col > pivot_tol)[0]
        #A > 0 keeps the problem bounded
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + pivot_tol * max(1.0, abs(best))]
        i = int(min(ties, key=lambda r: basis[r]))
        T[i] /= T[i, j]
        others = np.arange(m + 1) != i
        T[others] -= np.outer(T[others, j], T[i])
        basis[i] = j
    else:
        raise NumericalFailure("simplex did not terminate in %d pivots "
                               "for a %dx%d game" % (cap, m, n))
    w = np.zeros(n + m)
    w[basis] = T[:m, -1]
    return -T[m, -1], w[:n], -T[m, n:n + m]


def _clean(v):
    v = np.maximum(v, 0.0)
    return v / v.sum()


def matrix_value(M):
    """
    Usage:
      value, x, y = matrix_value(M)

    x guarantees at least value - 1e-9 against every column, y concedes at
    most value + 1e-9 against every row. Degenerate shapes, pure saddle
    points and 2x2 games are solved directly.
    """
    M = np.array(M, dtype=float)
    if M.ndim != 2 or 0 in M.shape or not np.all(np.isfinite(M)):
        raise BadMatrix("need a finite nonempty matrix, got shape %s" % (M.shape,))
    m, n = M.shape
    if m == 1:
        j = int(np.argmin(M[0]))
        return float(M[0, j]), np.ones(1), _onehot(j, n)
    if n == 1:
        i = int(np.argmax(M[:, 0]))
        return float(M[i, 0]), _onehot(i, m), np.ones(1)
    rowmin = M.min(axis=1)
    colmax = M.max(axis=0)
    lower, upper = rowmin.max(), colmax.min()
    if lower == upper:
        i, j = int(np.argmax(rowmin)), int(np.argmin(colmax))
        return float(lower), _onehot(i, m), _onehot(j, n)
    if m == 2 and n == 2:
        (a, b), (c, d) = M
        den = a + d - b - c
        p = (d - c) / den
        q = (d - b) / den
        value = (a * d - b * c) / den
        return float(value), np.array([p, 1.0 - p]), np.array([q, 1.0 - q])
    shift = 1.0 - M.min()
    z, w, dual = _simplex(M + shift)
    if not z > 0.0:
        raise NumericalFailure("simplex returned a nonpositive optimum")
    value = 1.0 / z - shift
    x, y = _clean(dual), _clean(w)
    lo, hi = guarantees(M, x, y)
    slack = exact_tol * max(1.0, float(np.abs(M).max()))
    if lo < value - slack or hi > value + slack:
        raise NumericalFailure("strategies miss the value %r: guarantees "
                               "(%r, %r)" % (value, lo, hi))
    return float(value), x, y
