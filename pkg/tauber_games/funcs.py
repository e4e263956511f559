#Some general functions
import os
import tempfile

import numpy as np
from scipy.integrate import quad

from .consts import oracle_abstol


def make_rng(seed):
    """
    Seeded generator used everywhere a random game or density is drawn.
    The seed is folded to 64 bits and expanded by numpy's SeedSequence
    into a PCG64 state, so a given seed gives the same stream on every
    platform.
    """
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def integrate(func, a, b, abstol=oracle_abstol, points=None):
    """
    Adaptive quadrature of a scalar function on [a, b] (b may be inf).
    This is the oracle the closed forms are checked against.
    """
    if np.isinf(b):
        val, _ = quad(func, a, b, epsabs=abstol, epsrel=0.0, limit=500)
        return val
    val, _ = quad(func, a, b, epsabs=abstol, epsrel=0.0, limit=500,
                  points=points)
    return val


def bisect_predicate(pred, lo, hi, iters=64):
    """
    Largest x in [lo, hi] with pred(x) true, for a predicate that is
    true on an initial segment. Returns hi if pred(hi) holds.
    """
    if pred(hi):
        return hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def dyadic_grid(lo_exp, hi_exp, inverse=False):
    """Powers of two 2^lo_exp .. 2^hi_exp, or their reciprocals"""
    exps = np.arange(lo_exp, hi_exp + 1, dtype=float)
    grid = np.power(2.0, exps)
    return 1.0 / grid if inverse else grid


def atomic_write(path, text):
    """
    Write text to path through a temp file in the same directory and a
    rename, so readers never see a half written file
    """
    path = os.path.abspath(path)
    dirname = os.path.dirname(path)
    fd, tmp = tempfile.mkstemp(dir=dirname, prefix=".tmp_", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="") as fp:
            fp.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
