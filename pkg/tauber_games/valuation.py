"""
Weighted game values V[rho] by backward induction over integer stages.

    A step process only sees rho through its stage weights
    theta_n = mass of rho on [n, n+1). Truncating after N stages and
    running the recursion

        W_n(w) = theta_n g(w) + val[ sum_w' kernel(w, a, b)(w') W_n+1(w') ]

    once from W_N = 0 and once from W_N = tail(N) gives a bracket around
    the exact value whose width is at most tail(N), because g lies in
    [0, 1] and the game mapping is 1-Lipschitz in the sup norm. The stage
    reward does not depend on actions, so only the continuation matrix
    goes through the matrix game solver.

    The remaining functions are independent oracles (series summation
    for chains, the discounted fixed point, finite Cesaro values) and the
    discrete dynamic programming check.
"""
import math

import numpy as np

from .classes import ValueBracket
from .consts import horizon_cap
from .density_calculus import Exponential, horizon, shift, stage_weights
from .errors import HorizonTooShort, InputError, NotAChain
from .minimax import matrix_value

__all__ = ["backup", "value_backward", "chain_series_value",
           "abel_fixed_point", "cesaro_finite", "dpp_check", "step_payoff"]

#step_payoff needs the ignored tail below this
payoff_tail = 1e-12


def _mixed_backup(game, KW):
    out = np.empty((game.state_count, KW.shape[1]))
    for w in range(game.state_count):
        a, b = game.actions_max[w], game.actions_min[w]
        block = KW[game.offsets[w]:game.offsets[w + 1]].reshape(a, b, -1)
        for c in range(KW.shape[1]):
            if a == 1:
                out[w, c] = block[0, :, c].min()
            elif b == 1:
                out[w, c] = block[:, 0, c].max()
            else:
                out[w, c] = matrix_value(block[:, :, c])[0]
    return out


def backup(game, W):
    """
    Stage game values of the continuation matrices kernel . W, one per
    state and per column of W (shape states x columns).
    """
    KW = game.stacked @ W
    kind = game.structure()
    if kind == "chain":
        return KW
    starts = game.offsets[:-1]
    if kind == "max":
        return np.maximum.reduceat(KW, starts, axis=0)
    if kind == "min":
        return np.minimum.reduceat(KW, starts, axis=0)
    return _mixed_backup(game, KW)


def _backward(game, weights, terminal):
    W = np.array(terminal, dtype=float)
    g = game.g[:, None]
    for theta in weights[::-1]:
        W = theta * g + backup(game, W)
    return W


def _bracket(W, tail):
    lo = np.clip(W[:, 0], 0.0, 1.0)
    hi = np.clip(W[:, 1], lo, 1.0)
    return ValueBracket(lo, hi, tail)


def value_backward(game, rho, tail_eps, cap=horizon_cap):
    """
    Usage:
      br = value_backward(game, rho, tail_eps)

    The horizon is the least N with tail(N) <= tail_eps; tail_eps = 0 is
    allowed for compactly supported densities and gives an exact value.
    """
    N = horizon(rho, tail_eps, cap)
    weights, tail = stage_weights(rho, N)
    terminal = np.zeros((game.state_count, 2))
    terminal[:, 1] = tail
    return _bracket(_backward(game, weights, terminal), tail)


def chain_series_value(chain, rho, tail_eps, cap=horizon_cap):
    """sum_n theta_n P^n g, summed forward; a chain only"""
    if not chain.is_chain():
        raise NotAChain("chain_series_value needs 1x1 action sets, got %r" % (chain,))
    N = horizon(rho, tail_eps, cap)
    weights, tail = stage_weights(rho, N)
    P = chain.transition_matrix()
    x = chain.g.copy()
    acc = np.zeros_like(x)
    for theta in weights:
        acc += theta * x
        x = P @ x
    lo = np.clip(acc, 0.0, 1.0)
    return ValueBracket(lo, np.clip(acc + tail, lo, 1.0), tail)


def abel_fixed_point(game, lam, tol):
    """
    Fixed point of v -> (1-beta) g + beta val[kernel v], beta = exp(-lam),
    by value iteration from 0; stops when the residual is below
    tol (1-beta), so the result is within tol of the fixed point.
    """
    lam, tol = float(lam), float(tol)
    if not (lam > 0.0 and tol > 0.0):
        raise InputError("lambda and tol must be positive")
    beta = math.exp(-lam)
    stop = tol * -math.expm1(-lam)
    v = np.zeros((game.state_count, 1))
    g = game.g[:, None]
    while True:
        new = -math.expm1(-lam) * g + beta * backup(game, v)
        residual = float(np.max(np.abs(new - v)))
        v = new
        if residual <= stop:
            return v[:, 0]


def cesaro_finite(game, n):
    """Exact value with n equal stage weights 1/n"""
    n = int(n)
    if n < 1:
        raise InputError("n must be a positive integer")
    weights = np.full(n, 1.0 / n)
    return _backward(game, weights, np.zeros((game.state_count, 1)))[:, 0]


def dpp_check(game, rho, n, tail_eps):
    """
    Sup-norm gap between V[rho] and the value of the composite payoff:
    n stages of rho's weights, then tail(n) V[shift(rho, n)]. Midpoints
    of the brackets are compared; the gap is at most tail_eps.
    """
    n = int(n)
    if n < 1:
        raise InputError("n must be a positive integer")
    shifted = shift(rho, n)
    direct = value_backward(game, rho, tail_eps)
    later = value_backward(game, shifted, tail_eps)
    weights, tail = stage_weights(rho, n)
    terminal = tail * np.column_stack((later.lo, later.hi))
    composite = _bracket(_backward(game, weights, terminal), tail * later.tail)
    return float(np.max(np.abs(direct.midpoint - composite.midpoint)))


def step_payoff(z, rho, g, horizon_n=None):
    """
    sum_n theta_n g(z(n)) for an eventually periodic step process z.

    Exponential densities are summed in closed form over the period;
    any other density is summed to horizon_n (by default the least N
    with tail below 1e-12), and HorizonTooShort is raised when the mass
    left over is not negligible.
    """
    g = np.asarray(g, dtype=float)
    if isinstance(rho, Exponential):
        P, L = len(z.preperiod), len(z.period)
        weights, _ = stage_weights(rho, P + L)
        vals = g[z.states(P + L)]
        head = math.fsum(weights[:P] * vals[:P])
        cycle = math.fsum(weights[P:] * vals[P:]) / -math.expm1(-rho.lam * L)
        return head + cycle
    N = horizon(rho, payoff_tail) if horizon_n is None else int(horizon_n)
    weights, tail = stage_weights(rho, N)
    if tail > payoff_tail:
        raise HorizonTooShort("%d stages leave mass %g of %s"
                              % (N, tail, rho.describe()))
    return math.fsum(weights * g[z.states(N)])
