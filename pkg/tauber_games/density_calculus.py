"""
Discounting densities on the half line [0, inf) and their calculus.

    Four kinds are supported, and the set is closed under every operation
    below (shift, scale, quantile, total variation):

      Uniform(T)                 rho(t) = 1/T on [0, T)
      Exponential(lam)           rho(t) = lam * exp(-lam t)
      Power(alpha, beta, gamma)  rho(t) = (gamma-1) beta alpha^(gamma-1)
                                          / (alpha + beta t)^gamma
      PiecewiseConstant(b, l)    rho(t) = l[i] on [b[i], b[i+1]), 0 elsewhere

    The Power normaliser (gamma-1) beta alpha^(gamma-1) makes every
    triple with gamma > 1 a unit mass density; Power(1, 1, 2) is
    (1+t)^-2. All densities are immutable, all operations are pure.

    Every pdf/cdf/tail method is vectorised over numpy arrays of times.
"""
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .consts import exact_tol, horizon_cap, smooth_samples
from .errors import (DensityParseError, EmptyInterval, GammaNotGreaterThanOne,
                     InputError, MassNotOne, NegativeTime, NonPositiveParameter,
                     QuantileOutOfRange, TailNeverSmall, ZeroTailMass)

__all__ = ["Density", "Uniform", "Exponential", "Power", "PiecewiseConstant",
           "construct", "cdf", "tail", "shift", "scale", "quantile",
           "total_variation", "log_variation", "l1_distance", "stage_weights", "horizon",
           "same_density", "parse_density"]

#Shifting needs at least this much mass beyond the cut
min_tail = 1e-12


def _positive(name, value):
    value = float(value)
    if not (np.isfinite(value) and value > 0.0):
        raise NonPositiveParameter("%s must be a positive real, got %r"
                                   % (name, value))
    return value


def _check_time(t):
    if np.any(np.asarray(t) < 0.0):
        raise NegativeTime("time must be nonnegative, got %g" % float(np.min(t)))


def _check_interval(a, b):
    if a < 0.0:
        raise NegativeTime("interval start %g is negative" % a)
    if not a < b:
        raise EmptyInterval("empty interval [%g, %g)" % (a, b))


def _check_level(r):
    r = float(r)
    if not 0.0 < r < 1.0:
        raise QuantileOutOfRange("quantile level %g outside (0, 1)" % r)
    return r


class Density:
    """
    Base class. Subclasses provide pdf, tail, inverse_tail, shift, scale
    and the variation functionals in closed form.
    """
    kind = None
    #True when the density is constant between consecutive breakpoints
    flat = False

    def cdf(self, t):
        return 1.0 - self.tail(t)

    def mass_between(self, a, b):
        return self.tail(a) - self.tail(b)

    def quantile(self, r):
        """Minimal positive t with cdf(t) = r"""
        r = _check_level(r)
        return float(self.inverse_tail(1.0 - r))

    def breakpoints(self):
        """Finite points where the density jumps, sorted"""
        return np.empty(0)

    def log_grid(self, a, b, step):
        """
        Points a = t_0 < ... < t_n = b such that ln(rho) varies by at most
        step on each [t_i, t_i+1). Flat kinds only need their breakpoints.
        """
        bp = self.breakpoints()
        return np.unique(np.concatenate(([a, b], bp[(bp > a) & (bp < b)])))

    def log_variations(self, edges):
        """log_variation on each [edges[i], edges[i+1])"""
        return np.array([self.log_variation(u, v)
                         for u, v in zip(edges[:-1], edges[1:])])

    def support_end(self):
        return math.inf

    def __call__(self, t):
        return self.pdf(t)


@dataclass(frozen=True)
class Uniform(Density):
    T: float
    kind = "uniform"
    flat = True

    def __post_init__(self):
        object.__setattr__(self, "T", _positive("T", self.T))

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.where((t >= 0.0) & (t < self.T), 1.0 / self.T, 0.0)

    def tail(self, t):
        t = np.asarray(t, dtype=float)
        return np.clip(1.0 - t / self.T, 0.0, 1.0)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.clip(t / self.T, 0.0, 1.0)

    def inverse_tail(self, s):
        return (1.0 - s) * self.T

    def quantile(self, r):
        r = _check_level(r)
        return float(r) * self.T

    def shift(self, T):
        return Uniform(self.T - T)

    def scale(self, lam):
        return Uniform(self.T / lam)

    def sup(self):
        return 1.0 / self.T

    def infimum_before(self, x):
        return 1.0 / self.T if x <= self.T else 0.0

    def total_variation(self, a, b):
        return 1.0 / self.T if a < self.T < b else 0.0

    def log_variation(self, a, b):
        return 0.0 if b <= self.T else math.inf

    def power_variation(self, p):
        return self.T ** (-p)

    def breakpoints(self):
        return np.array([self.T])

    def support_end(self):
        return self.T

    def params(self):
        return (self.T,)

    def describe(self):
        return "uniform:%r" % self.T


@dataclass(frozen=True)
class Exponential(Density):
    lam: float
    kind = "exp"

    def __post_init__(self):
        object.__setattr__(self, "lam", _positive("lambda", self.lam))

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0.0, self.lam * np.exp(-self.lam * t), 0.0)

    def tail(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-self.lam * np.maximum(t, 0.0))

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return -np.expm1(-self.lam * np.maximum(t, 0.0))

    def inverse_tail(self, s):
        with np.errstate(divide="ignore"):
            return -np.log(s) / self.lam

    def quantile(self, r):
        r = _check_level(r)
        return float(-math.log1p(-r) / self.lam)

    def shift(self, T):
        return self

    def scale(self, lam):
        return Exponential(self.lam * lam)

    def sup(self):
        return self.lam

    def infimum_before(self, x):
        return float(self.pdf(x))

    def total_variation(self, a, b):
        return float(self.lam * (math.exp(-self.lam * a) - math.exp(-self.lam * b)))

    def log_variation(self, a, b):
        return self.lam * (b - a)

    def log_variations(self, edges):
        return self.lam * np.diff(edges)

    def log_grid(self, a, b, step):
        count = max(int(math.ceil(self.lam * (b - a) / step)), 1)
        return np.linspace(a, b, count + 1)

    def power_variation(self, p):
        return self.lam ** p

    def params(self):
        return (self.lam,)

    def describe(self):
        return "exp:%r" % self.lam


@dataclass(frozen=True)
class Power(Density):
    alpha: float
    beta: float
    gamma: float
    kind = "power"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))
        object.__setattr__(self, "beta", _positive("beta", self.beta))
        gamma = float(self.gamma)
        if not (np.isfinite(gamma) and gamma > 1.0):
            raise GammaNotGreaterThanOne("gamma must exceed 1, got %r" % (gamma,))
        object.__setattr__(self, "gamma", gamma)

    @property
    def rate(self):
        """beta/alpha; together with gamma it determines the density"""
        return self.beta / self.alpha

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        k = self.rate
        val = (self.gamma - 1.0) * k * np.power(1.0 + k * np.maximum(t, 0.0),
                                                -self.gamma)
        return np.where(t >= 0.0, val, 0.0)

    def tail(self, t):
        t = np.asarray(t, dtype=float)
        return np.power(1.0 + self.rate * np.maximum(t, 0.0), 1.0 - self.gamma)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return -np.expm1((1.0 - self.gamma) * np.log1p(self.rate * np.maximum(t, 0.0)))

    def inverse_tail(self, s):
        with np.errstate(divide="ignore", over="ignore"):
            return np.expm1(-np.log(s) / (self.gamma - 1.0)) / self.rate

    def quantile(self, r):
        r = _check_level(r)
        return float(math.expm1(-math.log1p(-r) / (self.gamma - 1.0)) / self.rate)

    def shift(self, T):
        return Power(self.alpha + self.beta * T, self.beta, self.gamma)

    def scale(self, lam):
        return Power(self.alpha, self.beta * lam, self.gamma)

    def sup(self):
        return float(self.pdf(0.0))

    def infimum_before(self, x):
        return float(self.pdf(x))

    def total_variation(self, a, b):
        return float(self.pdf(a) - (0.0 if math.isinf(b) else self.pdf(b)))

    def log_variation(self, a, b):
        return self.gamma * (math.log1p(self.rate * b) - math.log1p(self.rate * a))

    def log_variations(self, edges):
        return self.gamma * np.diff(np.log1p(self.rate * np.asarray(edges)))

    def log_grid(self, a, b, step):
        count = max(int(math.ceil(self.log_variation(a, b) / step)), 1)
        pts = np.geomspace(1.0 + self.rate * a, 1.0 + self.rate * b, count + 1)
        pts = (pts - 1.0) / self.rate
        pts[0], pts[-1] = a, b
        return pts

    def power_variation(self, p):
        return self.sup() ** p

    def params(self):
        return (self.alpha, self.beta, self.gamma)

    def describe(self):
        return "power:%r,%r,%r" % (self.alpha, self.beta, self.gamma)


class PiecewiseConstant(Density):
    """
    Step density: levels[i] on [breakpoints[i], breakpoints[i+1]) and
    zero before the first and after the last breakpoint.
    """
    kind = "pc"
    flat = True

    def __init__(self, breakpoints, levels, renormalize=False):
        b = np.array(breakpoints, dtype=float)
        lv = np.array(levels, dtype=float)
        if b.ndim != 1 or b.size < 2 or not np.all(np.isfinite(b)):
            raise InputError("need at least two finite breakpoints")
        if b[0] < 0.0:
            raise NegativeTime("first breakpoint %r is negative" % (float(b[0]),))
        if np.any(np.diff(b) <= 0.0):
            raise InputError("breakpoints must be strictly increasing")
        if lv.shape != (b.size - 1,):
            raise InputError("expected %d levels, got %d" % (b.size - 1, lv.size))
        if not np.all(np.isfinite(lv)) or np.any(lv < 0.0):
            raise NonPositiveParameter("levels must be finite and nonnegative")
        masses = lv * np.diff(b)
        total = math.fsum(masses)
        if not total > 0.0:
            raise MassNotOne("piecewise constant density has zero mass")
        if abs(total - 1.0) > exact_tol:
            if not renormalize:
                raise MassNotOne("mass %r differs from 1" % (total,))
        if renormalize:
            lv = lv / total
            masses = masses / total
        self.b = b
        self.levels = lv
        self.masses = masses
        #Cumulative mass from the left and remaining mass to the right
        self._cum = np.concatenate(([0.0], np.cumsum(masses)))
        self._tails = np.concatenate((np.cumsum(masses[::-1])[::-1], [0.0]))
        for arr in (self.b, self.levels, self.masses, self._cum, self._tails):
            arr.flags.writeable = False

    def __repr__(self):
        return "PiecewiseConstant(%d pieces on [%r, %r))" % (
            self.levels.size, float(self.b[0]), float(self.b[-1]))

    def __eq__(self, other):
        return (isinstance(other, PiecewiseConstant)
                and np.array_equal(self.b, other.b)
                and np.array_equal(self.levels, other.levels))

    def __hash__(self):
        return hash((self.b.tobytes(), self.levels.tobytes()))

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.b, t, side="right") - 1
        inside = (idx >= 0) & (idx < self.levels.size)
        return np.where(inside, self.levels[np.clip(idx, 0, self.levels.size - 1)], 0.0)

    def tail(self, t):
        return np.interp(np.asarray(t, dtype=float), self.b, self._tails,
                         left=1.0, right=0.0)

    def cdf(self, t):
        return np.interp(np.asarray(t, dtype=float), self.b, self._cum,
                         left=0.0, right=1.0)

    def inverse_tail(self, s):
        s = np.asarray(s, dtype=float)
        #First breakpoint whose remaining mass is <= s
        j = np.searchsorted(-self._tails, -s, side="left")
        i = np.clip(j - 1, 0, self.levels.size - 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.maximum(self.b[i], self.b[i] + (self._tails[i] - s) / self.levels[i])
        t = np.where(s <= 0.0, self.b[-1], np.where(s >= 1.0, self.b[0], t))
        return float(t) if t.ndim == 0 else t

    def quantile(self, r):
        r = _check_level(r)
        j = int(np.searchsorted(self._cum, r, side="left"))
        i = min(max(j - 1, 0), self.levels.size - 1)
        return float(max(self.b[i], self.b[i] + (r - self._cum[i]) / self.levels[i]))

    def shift(self, T):
        b, lv = self.b, self.levels
        if T <= b[0]:
            return PiecewiseConstant(b - T, lv, renormalize=True)
        i = int(np.searchsorted(b, T, side="right")) - 1
        nb = np.concatenate(([0.0], b[i + 1:] - T))
        return PiecewiseConstant(nb, lv[i:], renormalize=True)

    def scale(self, lam):
        return PiecewiseConstant(self.b / lam, self.levels * lam, renormalize=True)

    def sup(self):
        return float(self.levels.max())

    def _edge_levels(self):
        return np.concatenate(([0.0], self.levels, [0.0]))

    def infimum_before(self, x):
        if self.b[0] > 0.0 or x > self.b[-1]:
            return 0.0
        n = int(np.searchsorted(self.b, x, side="left"))
        return float(self.levels[:max(n, 1)].min())

    def total_variation(self, a, b):
        ext = self._edge_levels()
        jumps = np.abs(np.diff(ext))
        inside = (self.b > a) & (self.b < b)
        return float(jumps[inside].sum())

    def log_variation(self, a, b):
        ext = self._edge_levels()
        #Pieces meeting [a, b), including the zero region before b[0]
        lo = int(np.searchsorted(self.b, a, side="right"))
        hi = int(np.searchsorted(self.b, b, side="left"))
        if np.any(ext[lo:hi + 1] <= 0.0):
            return math.inf
        inside = (self.b > a) & (self.b < b)
        with np.errstate(divide="ignore", invalid="ignore"):
            jumps = np.abs(np.diff(np.log(ext)))
        return float(jumps[inside].sum())

    def log_variations(self, edges):
        edges = np.asarray(edges, dtype=float)
        ext = self._edge_levels()
        with np.errstate(divide="ignore", invalid="ignore"):
            jumps = np.abs(np.diff(np.log(ext)))
        jumps = np.where(np.isfinite(jumps), jumps, 0.0)
        cum = np.concatenate(([0.0], np.cumsum(jumps)))
        lo = np.searchsorted(self.b, edges[:-1], side="right")
        hi = np.searchsorted(self.b, edges[1:], side="left")
        out = cum[np.maximum(hi, lo)] - cum[lo]
        #Every piece meeting an interval must be positive
        zero = np.concatenate(([0], np.cumsum(ext <= 0.0)))
        vanish = zero[hi + 1] - zero[lo] > 0
        return np.where(vanish, math.inf, out)

    def power_variation(self, p):
        ext = self._edge_levels() ** p
        jumps = np.abs(np.diff(ext))
        return float(jumps[self.b > 0.0].sum())

    def breakpoints(self):
        return self.b

    def support_end(self):
        return float(self.b[-1])

    def params(self):
        return (self.b, self.levels)

    def describe(self):
        return "pc:%d pieces on [%r,%r)" % (self.levels.size, float(self.b[0]),
                                             float(self.b[-1]))


_kinds = {
    "uniform": Uniform,
    "exp": Exponential,
    "exponential": Exponential,
    "power": Power,
}
_arity = {"uniform": 1, "exp": 1, "exponential": 1, "power": 3}


def construct(kind, *params, renormalize=False):
    """
    Build a density from a kind tag and its real parameters.

    Usage:
      construct("uniform", T)
      construct("exp", lam)
      construct("power", alpha, beta, gamma)
      construct("pc", breakpoints, levels, renormalize=False)
    """
    if kind in ("pc", "piecewise"):
        return PiecewiseConstant(*params, renormalize=renormalize)
    try:
        cls = _kinds[kind]
    except KeyError:
        raise InputError("unknown density kind %r" % (kind,))
    return cls(*params)


def cdf(rho, t):
    _check_time(t)
    return float(rho.cdf(t)) if np.ndim(t) == 0 else rho.cdf(t)


def tail(rho, t):
    _check_time(t)
    return float(rho.tail(t)) if np.ndim(t) == 0 else rho.tail(t)


def shift(rho, T):
    """Density conditioned on surviving past T, translated back to 0"""
    T = float(T)
    if T < 0.0:
        raise NonPositiveParameter("shift must be nonnegative, got %r" % (T,))
    if T == 0.0:
        return rho
    if float(rho.tail(T)) <= min_tail:
        raise ZeroTailMass("no mass beyond T=%r for %s" % (T, rho.describe()))
    return rho.shift(T)


def scale(rho, lam):
    """Time rescaled density lam * rho(lam t)"""
    lam = _positive("lambda", lam)
    return rho.scale(lam)


def quantile(rho, r):
    return rho.quantile(r)


def total_variation(rho, a, b=math.inf):
    _check_interval(a, b)
    return rho.total_variation(float(a), float(b))


def log_variation(rho, a, b):
    """Total variation of ln(rho) on [a, b); inf where rho vanishes"""
    _check_interval(a, b)
    return rho.log_variation(float(a), float(b))


def stage_weights(rho, N):
    """
    Mass of rho on the unit intervals [n, n+1), n < N, and the mass left
    after N. These are the exact payoff weights of a step process.
    """
    N = int(N)
    if N < 1:
        raise InputError("need at least one stage, got %r" % (N,))
    tails = rho.tail(np.arange(N + 1, dtype=float))
    weights = np.maximum(tails[:-1] - tails[1:], 0.0)
    return weights, float(tails[-1])


def horizon(rho, tail_eps, cap=horizon_cap):
    """Minimal integer N >= 1 with tail(N) <= tail_eps"""
    tail_eps = float(tail_eps)
    if tail_eps < 0.0:
        raise InputError("tail_eps must be nonnegative")
    guess = rho.support_end() if tail_eps == 0.0 else rho.inverse_tail(tail_eps)
    guess = float(guess)
    if not np.isfinite(guess) or guess > cap:
        raise TailNeverSmall("%s needs more than %d stages for tail %g"
                             % (rho.describe(), cap, tail_eps))
    N = max(int(math.ceil(guess)), 1)
    while float(rho.tail(N)) > tail_eps:
        N += 1
        if N > cap:
            raise TailNeverSmall("%s needs more than %d stages for tail %g"
                                 % (rho.describe(), cap, tail_eps))
    while N > 1 and float(rho.tail(N - 1)) <= tail_eps:
        N -= 1
    return N


def same_density(rho, nu, rtol=1e-12):
    """
    Parameter level equality. Power densities compare by (beta/alpha,
    gamma); step densities by their arrays.
    """
    if rho.kind != nu.kind:
        return False
    if rho.kind == "power":
        return (math.isclose(rho.rate, nu.rate, rel_tol=rtol)
                and math.isclose(rho.gamma, nu.gamma, rel_tol=rtol))
    if rho.kind == "pc":
        return (rho.b.shape == nu.b.shape
                and np.allclose(rho.b, nu.b, rtol=rtol, atol=0.0)
                and np.allclose(rho.levels, nu.levels, rtol=rtol, atol=0.0))
    return all(math.isclose(x, y, rel_tol=rtol)
               for x, y in zip(rho.params(), nu.params()))


def _far_end(rho, nu):
    ends = []
    for d in (rho, nu):
        end = d.support_end()
        if math.isinf(end):
            end = float(d.inverse_tail(1e-16))
            if not np.isfinite(end):
                end = 1e15
        ends.append(min(end, 1e15))
    return max(ends)


def _sample_pieces(cuts, dense):
    """Sample points covering [cuts[0], cuts[-1]); piece starts always included"""
    if not dense:
        lefts = cuts[:-1]
        rights = np.nextafter(cuts[1:], -np.inf)
        return np.sort(np.concatenate((lefts, rights)))
    pts = []
    for u, v in zip(cuts[:-1], cuts[1:]):
        if v - u <= 50.0:
            pts.append(np.linspace(u, v, smooth_samples + 1)[:-1])
        else:
            pts.append(np.linspace(u, u + 50.0, smooth_samples // 2 + 1)[:-1])
            pts.append(np.geomspace(u + 50.0, v, smooth_samples // 2 + 1)[:-1])
        pts.append([np.nextafter(v, -np.inf)])
    return np.unique(np.concatenate(pts))


def l1_distance(rho, nu):
    """
    Integral of |rho - nu| over [0, inf).

    The half line is cut at every breakpoint of either density. On each
    piece the sign of rho - nu is sampled (the endpoints suffice when one
    side is constant there, since every kind is monotone between its
    breakpoints), crossings are located with brentq, and the integral
    over each constant sign stretch is the exact difference of masses.
    """
    if rho is nu:
        return 0.0
    far = _far_end(rho, nu)
    cuts = np.concatenate(([0.0, far], rho.breakpoints(), nu.breakpoints()))
    cuts = np.unique(cuts[(cuts >= 0.0) & (cuts <= far)])
    pts = _sample_pieces(cuts, dense=not (rho.flat or nu.flat))
    d = rho.pdf(pts) - nu.pdf(pts)
    sgn = np.sign(d)
    change = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    roots = []
    diff = lambda t: float(rho.pdf(t) - nu.pdf(t))
    for k in change:
        lo, hi = pts[k], pts[k + 1]
        if np.searchsorted(cuts, lo, side="right") != np.searchsorted(cuts, hi, side="right"):
            #Sign flips across a breakpoint, which is already a cut
            continue
        roots.append(brentq(diff, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))
    bounds = np.unique(np.concatenate((cuts, roots, pts[sgn == 0])))
    tr, tn = rho.tail(bounds), nu.tail(bounds)
    pieces = np.abs((tr[:-1] - tr[1:]) - (tn[:-1] - tn[1:]))
    rest = abs(float(tr[-1]) - float(tn[-1]))
    return float(math.fsum(pieces) + rest)


def _read_pc_csv(path):
    rows = np.loadtxt(path, delimiter=",", ndmin=2)
    if rows.shape[1] != 2 or rows.shape[0] < 2:
        raise InputError("expected breakpoint,level rows in %s" % (path,))
    return construct("pc", rows[:, 0], rows[:-1, 1], renormalize=True)


def _floats(token, text, count):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise DensityParseError(token, "parameters must be reals")
    if len(vals) != count:
        raise DensityParseError(token, "expected %d parameter(s)" % count)
    return vals


def parse_density(text, base_dir=None):
    """
    Parse the density mini grammar, left to right:

      uniform:T | exp:LAMBDA | power:ALPHA,BETA,GAMMA | pc:PATH.csv
      followed by any number of |shift:T and |scale:L modifiers

    e.g. "power:1,1,2|shift:10|scale:0.5". A pc file holds
    breakpoint,level rows; the last row closes the support (its level is
    ignored) and the levels are renormalised to unit mass.
    """
    tokens = [tok.strip() for tok in str(text).split("|")]
    rho = None
    for pos, token in enumerate(tokens):
        name, sep, args = token.partition(":")
        name = name.strip().lower()
        if not sep:
            raise DensityParseError(token, "missing ':'")
        try:
            if pos == 0:
                if name in _arity:
                    rho = construct(name, *_floats(token, args, _arity[name]))
                elif name == "pc":
                    path = args.strip()
                    if base_dir is not None and not os.path.isabs(path):
                        path = os.path.join(base_dir, path)
                    if not os.path.exists(path):
                        raise DensityParseError(token, "no such file")
                    rho = _read_pc_csv(path)
                else:
                    raise DensityParseError(token, "unknown density kind")
            elif name == "shift":
                rho = shift(rho, *_floats(token, args, 1))
            elif name == "scale":
                rho = scale(rho, *_floats(token, args, 1))
            else:
                raise DensityParseError(token, "unknown modifier")
        except DensityParseError:
            raise
        except InputError as err:
            raise DensityParseError(token, str(err))
    return rho
