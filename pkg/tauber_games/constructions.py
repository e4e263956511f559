"""
Constructions on densities that the Tauberian argument is built from,
exposed so that each step can be audited numerically:

    pc_approximate      step approximation supported on a quantile window
    regularize_support  truncate at q(1-eps) and lift by eps/q(1-eps)
    proof_constants     k, p, delta, kappa from (eps, M, r0)
    quantile_partition  cut [0, q(1-eps)) into k^2 pieces of geometric mass
    tv_correct          flatten the pieces where ln(mu) varies too much

All functions are pure and return new densities.
"""
import math
from dataclasses import dataclass

import numpy as np

from .consts import exact_tol, regularize_knots, regularize_sampling_err
from .density_calculus import PiecewiseConstant, l1_distance, log_variation
from .errors import (BinCountTooSmall, DegenerateInterval, InvalidParameter,
                     NonPositiveDensityOnSupport, NotPiecewiseConstant)

__all__ = ["ProofConstants", "QuantilePartition", "pc_approximate",
           "regularize_support", "proof_constants", "quantile_partition",
           "tv_correct", "construction_audit"]

#Never resample on more knots than this
max_knots = 10**6


@dataclass(frozen=True)
class ProofConstants:
    epsilon: float
    M: float
    r0: float
    k: int
    p: float
    delta: float
    kappa: float

    @classmethod
    def from_k(cls, epsilon, k, M=1.0, r0=0.25):
        """
        Constants for a given k, without checking the three inequalities
        proof_constants enforces. p = eps^(1/k^2) and delta = 1 - p are
        kept consistent in floating point.
        """
        if not 0.0 < epsilon < 1.0:
            raise InvalidParameter("epsilon must lie in (0, 1)")
        k = int(k)
        if k < 1:
            raise InvalidParameter("k must be a positive integer")
        p = math.exp(math.log(epsilon) / (k * k))
        delta = 1.0 - p
        return cls(epsilon=float(epsilon), M=float(M), r0=float(r0), k=k,
                   p=p, delta=delta, kappa=epsilon * delta)

    @property
    def pieces(self):
        return self.k * self.k

    def step_one_holds(self):
        eps, k = self.epsilon, self.k
        return (k > eps / self.r0
                and k * eps > math.log(1.0 / eps)
                and k * eps * math.log1p(eps) > self.M)

    def geometric_mass(self):
        """delta (1 + p + ... + p^(k^2-1)), which equals 1 - eps"""
        return self.delta * math.fsum(np.power(self.p, np.arange(self.pieces)))


@dataclass(frozen=True)
class QuantilePartition:
    epsilon: float
    k: int
    p: float
    tau: np.ndarray
    lambdas: np.ndarray
    masses: np.ndarray

    def expected_masses(self):
        m = np.arange(self.tau.size - 1)
        return np.power(self.p, m) * (1.0 - self.p)


def pc_approximate(rho, n):
    """
    Step density on [q(1/n), q(1-1/n)] within 5/n of rho in L1.

    The window is cut where ln(rho) has varied by ln(1+1/n), so each piece
    is within a relative 1/n of its mean; the pieces carry rho's exact
    mass and the result is renormalised by n/(n-2).

    Returns (mu_bar, l1_error) with the L1 distance actually attained.
    """
    n = int(n)
    if n < 4:
        raise BinCountTooSmall("need n >= 4, got %d" % n)
    a = rho.quantile(1.0 / n)
    b = rho.quantile(1.0 - 1.0 / n)
    step = math.log1p(1.0 / n)
    edges = rho.log_grid(a, b, step)
    if edges.size > max_knots + 1:
        edges = rho.log_grid(a, b, rho.log_variation(a, b) / max_knots)
    masses = rho.tail(edges[:-1]) - rho.tail(edges[1:])
    mu = PiecewiseConstant(edges, masses / np.diff(edges), renormalize=True)
    return mu, l1_distance(rho, mu)


def regularize_support(mu_hat, epsilon, knots=regularize_knots):
    """
    mu(t) = mu_hat(t) + eps/Q on [0, Q), 0 after, with Q = q[mu_hat](1-eps).

    mu_hat is replaced by its exact mean on each piece of a grid that has
    at least `knots` uniform pieces and is refined where ln(mu_hat)
    varies, which keeps the resampling error near 1e-6.
    """
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameter("epsilon must lie in (0, 1)")
    Q = mu_hat.quantile(1.0 - epsilon)
    edges = np.linspace(0.0, Q, int(knots) + 1)
    if not mu_hat.flat:
        logvar = log_variation(mu_hat, 0.0, Q)
        step = max(math.log1p(regularize_sampling_err), logvar / max_knots)
        edges = np.union1d(edges, mu_hat.log_grid(0.0, Q, step))
    bp = mu_hat.breakpoints()
    edges = np.union1d(edges, bp[(bp > 0.0) & (bp < Q)])
    masses = mu_hat.tail(edges[:-1]) - mu_hat.tail(edges[1:])
    levels = masses / np.diff(edges) + epsilon / Q
    return PiecewiseConstant(edges, levels, renormalize=True)


def proof_constants(epsilon, M, r0):
    """
    Minimal k with k > eps/r0, k eps > ln(1/eps), k eps ln(1+eps) > M,
    and p = eps^(1/k^2), delta = 1 - p, kappa = eps delta.
    """
    if not 0.0 < epsilon < 0.1:
        raise InvalidParameter("epsilon must lie in (0, 1/10), got %r" % (epsilon,))
    if not M > 1.0:
        raise InvalidParameter("M must exceed 1, got %r" % (M,))
    if not 0.0 < r0 < 0.5:
        raise InvalidParameter("r0 must lie in (0, 1/2), got %r" % (r0,))
    bounds = (epsilon / r0,
              math.log(1.0 / epsilon) / epsilon,
              M / (epsilon * math.log1p(epsilon)))
    k = max(int(math.floor(x)) + 1 for x in bounds)
    while not ProofConstants.from_k(epsilon, k, M, r0).step_one_holds():
        k += 1
    while k > 1 and ProofConstants.from_k(epsilon, k - 1, M, r0).step_one_holds():
        k -= 1
    return ProofConstants.from_k(epsilon, k, M, r0)


def quantile_partition(mu, constants):
    """
    tau_0 = 0 and tau_m = q[mu](1 - p^m), m = 1..k^2, so that the m-th
    piece carries mass p^(m-1)(1-p); lambdas are the mean levels.
    """
    K = constants.k * constants.k
    p = constants.p
    levels = np.power(p, np.arange(1, K + 1))
    tau = np.concatenate(([0.0], np.asarray(mu.inverse_tail(levels), dtype=float)))
    widths = np.diff(tau)
    if np.any(widths <= 0.0) or not np.all(np.isfinite(tau)):
        m = int(np.argmax(~(widths > 0.0))) + 1
        raise DegenerateInterval("quantiles %d and %d coincide" % (m - 1, m))
    masses = mu.tail(tau[:-1]) - mu.tail(tau[1:])
    return QuantilePartition(epsilon=constants.epsilon, k=constants.k, p=p,
                             tau=tau, lambdas=masses / widths, masses=masses)


def tv_correct(mu, partition, M, k, epsilon):
    """
    Replace mu by its mean level on every piece where the variation of
    ln(mu) exceeds M/(k eps). Masses of all pieces are unchanged.

    Returns (mu_tilde, incorrect_count).
    """
    tau = partition.tau
    if mu.infimum_before(tau[-1]) <= 0.0:
        raise NonPositiveDensityOnSupport(
            "%s vanishes before %g" % (mu.describe(), tau[-1]))
    logvar = mu.log_variations(tau)
    incorrect = logvar > M / (k * epsilon)
    count = int(incorrect.sum())
    if count == 0:
        return mu, 0
    if not isinstance(mu, PiecewiseConstant):
        raise NotPiecewiseConstant(
            "cannot flatten %d pieces of %s" % (count, mu.describe()))
    edges = np.union1d(mu.b, tau)
    mids = 0.5 * (edges[:-1] + edges[1:])
    levels = mu.pdf(mids)
    piece = np.searchsorted(tau, mids, side="right") - 1
    inside = (piece >= 0) & (piece < incorrect.size)
    flatten = np.zeros(mids.size, dtype=bool)
    flatten[inside] = incorrect[piece[inside]]
    levels[flatten] = partition.lambdas[piece[flatten]]
    return PiecewiseConstant(edges, levels, renormalize=True), count


def construction_audit(mu_hat, epsilon, M, r0, n=100, constants=None):
    """
    Run the whole chain on one density and report every checked quantity:
    constants, geometric identity, regularisation mass and L1, partition
    masses, flattening counts and L1, and the step approximation error.
    """
    c = constants if constants is not None else proof_constants(epsilon, M, r0)
    report = {
        "density": mu_hat.describe(),
        "epsilon": c.epsilon, "M": c.M, "r0": c.r0,
        "k": c.k, "p": c.p, "delta": c.delta, "kappa": c.kappa,
        "step_one_holds": c.step_one_holds(),
        "geometric_identity_error": abs(c.geometric_mass() - (1.0 - c.epsilon)),
    }
    mu = regularize_support(mu_hat, c.epsilon)
    report["regularized_mass"] = float(mu._cum[-1])
    report["regularized_l1"] = l1_distance(mu, mu_hat)
    report["regularized_l1_bound"] = 2.0 * c.epsilon
    part = quantile_partition(mu, c)
    report["partition_pieces"] = int(part.tau.size - 1)
    report["partition_mass_error"] = float(np.max(np.abs(part.masses - part.expected_masses())))
    report["log_variation_total"] = log_variation(mu, 0.0, part.tau[-1])
    report["log_variation_bound"] = c.M / c.epsilon
    mu_tilde, count = tv_correct(mu, part, c.M, c.k, c.epsilon)
    report["incorrect_count"] = count
    report["corrected_l1"] = l1_distance(mu_tilde, mu)
    report["corrected_l1_bound"] = 2.0 * c.k * c.delta
    report["corrected_mass_ok"] = bool(abs(mu_tilde.cdf(mu_tilde.support_end()) - 1.0)
                                       <= exact_tol)
    mu_bar, err = pc_approximate(mu_hat, n)
    report["pc_n"] = int(n)
    report["pc_l1"] = err
    report["pc_l1_bound"] = 5.0 / n
    return report
