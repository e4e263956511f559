#!/usr/bin/env python
"""
Tauberian experiments: value families over density grids, the common
limit they approach, and density level checks of the hypotheses that
make such families equivalent.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from pprint import pprint

import numpy as np

from .classes import (AdmissibilityReport, EquivalenceReport, FamilyTable,
                      FamilyTestReport, ValueBracket, gather_table)
from .consts import exact_tol, pbar_avail, root, sup_samples, widgets_sweep
from .density_calculus import shift, total_variation
from .errors import InputError, MissingReferenceFamily
from .funcs import bisect_predicate
from .valuation import cesaro_finite, step_payoff, value_backward

if pbar_avail:
    import progressbar

__all__ = ["TauberSystem", "family_values", "equivalence_report",
           "check_admissible", "check_test_family", "shift_spot_check",
           "lower_bound_check", "cesaro_ratio_gap", "discrete_shift_gap"]

#Shifts tried by shift_spot_check, as fractions of q(r0)
spot_fractions = (0.25, 0.5, 0.75)
#Reference families for the limit, in order of preference
abel_refs = ("abel",)
cesaro_refs = ("cesaro_discrete", "cesaro")


def evaluate_point(game, spec, index, tail_eps):
    """Bracket of one grid point of a family"""
    point = spec.grid[index]
    eps = tail_eps if spec.tail_eps is None else spec.tail_eps
    if spec.kind == "cesaro_discrete":
        v = cesaro_finite(game, int(point))
        return _exact(v)
    if spec.kind == "cesaro":
        return value_backward(game, spec.density(point), 0.0)
    return value_backward(game, spec.density(point), eps)


def _exact(v):
    v = np.clip(v, 0.0, 1.0)
    return ValueBracket(v, v.copy(), 0.0)


def _evaluate_job(job):
    game, spec, index, tail_eps = job
    return index, evaluate_point(game, spec, index, tail_eps)


class TauberSystem:
    """
      Class that runs Tauberian sweeps on one game.

         Grid points of a family are independent work items. Under MPI
         they are dealt round robin to the ranks of the communicator and
         gathered on the root; without MPI they run serially or on a
         local process pool. Either way the resulting tables are ordered
         by grid index, so the output does not depend on scheduling.

           Usage:
           S = TauberSystem(game, 1e-9, comm=MPI.COMM_WORLD, verbose=True)
           report = S.equivalence_report(specs, tol=0.02)

           Parameters:
           game     = A StochasticGame
           tail_eps = Truncated tail mass allowed per value bracket
                      (families may override it)
           comm     = MPI communicator, or None to run without MPI
           jobs     = Local worker processes when comm is None or has a
                      single rank. Defaults to 1 (serial).
           verbose  = Print run parameters and progress on the root.
    """

    def __init__(self, game, tail_eps, comm=None, jobs=1, verbose=False):
        tail_eps = float(tail_eps)
        if not 0.0 <= tail_eps < 1.0:
            raise InputError("tail_eps must lie in [0, 1), got %r" % (tail_eps,))
        self.game = game
        self.tail_eps = tail_eps
        self.comm = comm
        self.jobs = max(int(jobs), 1)
        self.verbose = verbose

    @property
    def rank(self):
        return self.comm.rank if self.comm is not None else root

    @property
    def is_root(self):
        return self.rank == root

    def _bar(self, size):
        if self.verbose and pbar_avail and self.is_root and size > 1:
            return progressbar.ProgressBar(widgets=widgets_sweep,
                                           max_value=size, redirect_stdout=False)
        return None

    def sweep(self, spec):
        """FamilyTable of spec on the root, None on other ranks"""
        size = len(spec.grid)
        if self.comm is not None and self.comm.size > 1:
            #Let each process get its grid points by round robin
            local = [(i, evaluate_point(self.game, spec, i, self.tail_eps))
                     for i in range(self.comm.rank, size, self.comm.size)]
            return gather_table(spec, local, self.comm)
        bar = self._bar(size)
        jobs = [(self.game, spec, i, self.tail_eps) for i in range(size)]
        results = {}
        if self.jobs > 1 and size > 1:
            with ProcessPoolExecutor(max_workers=min(self.jobs, size)) as pool:
                for done, (i, br) in enumerate(pool.map(_evaluate_job, jobs)):
                    results[i] = br
                    if bar is not None:
                        bar.update(done + 1)
        else:
            for done, job in enumerate(jobs):
                i, br = _evaluate_job(job)
                results[i] = br
                if bar is not None:
                    bar.update(done + 1)
        if bar is not None:
            bar.finish()
        return FamilyTable(spec, [results[i] for i in range(size)])

    def equivalence_report(self, specs, tol):
        if self.is_root and self.verbose:
            pprint("# Run parameters:")
            pprint({"game": repr(self.game), "tail_eps": self.tail_eps,
                    "jobs": self.jobs, "tol": tol,
                    "families": [s.describe() for s in specs]}, depth=3)
        _require_reference(specs)
        tables = []
        for spec in specs:
            if self.is_root and self.verbose:
                pprint("# Sweeping %s over %d points" % (spec.label, len(spec.grid)))
            tables.append(self.sweep(spec))
        if not self.is_root:
            return None
        report = assemble_report(tables, tol, self.tail_eps)
        if self.verbose:
            pprint("# Done! u_star = %s" % (report.u_star.tolist(),))
        return report


def _require_reference(specs):
    kinds = {s.kind for s in specs}
    if not kinds & set(abel_refs + cesaro_refs):
        raise MissingReferenceFamily(
            "need an abel or cesaro_discrete family to estimate the limit, got %s"
            % sorted(kinds))


def family_values(game, spec, tail_eps, jobs=1):
    """One bracket per grid point, as a FamilyTable"""
    return TauberSystem(game, tail_eps, jobs=jobs).sweep(spec)


def _reference(tables, kinds):
    for kind in kinds:
        for table in tables:
            if table.spec.kind == kind:
                return table.finest()
    return None


def assemble_report(tables, tol, tail_eps):
    """
    u_star is the mean of the finest abel and finest cesaro midpoints
    (or the one of them present) and the disagreement is their sup-norm
    gap. A family passes when its finest deviation is within tol plus
    the width of its own finest bracket.
    """
    _require_reference([t.spec for t in tables])
    refs = [br for br in (_reference(tables, abel_refs),
                          _reference(tables, cesaro_refs)) if br is not None]
    mids = [br.midpoint for br in refs]
    u_star = np.clip(np.mean(mids, axis=0), 0.0, 1.0)
    disagreement = float(np.max(np.abs(mids[0] - mids[-1])))
    labelled, deviations, verdicts = {}, {}, {}
    for table in tables:
        label, k = table.spec.label, 1
        while label in labelled:
            k += 1
            label = "%s_%d" % (table.spec.label, k)
        labelled[label] = table
        devs = [br.deviation(u_star) for br in table.brackets]
        deviations[label] = devs
        finest = table.spec.finest_index
        verdicts[label] = devs[finest] <= tol + table.brackets[finest].width
    return EquivalenceReport(u_star=u_star, u_star_disagreement=disagreement,
                             tables=labelled, deviations=deviations,
                             verdicts=verdicts, tol=float(tol),
                             tail_eps=float(tail_eps))


def equivalence_report(game, specs, tol, tail_eps, jobs=1, verbose=False):
    return TauberSystem(game, tail_eps, jobs=jobs,
                        verbose=verbose).equivalence_report(specs, tol)


def check_admissible(family, grid, eps_grid, sup_tol=0.05, product_bound=10.0,
                     p=1.0):
    """
    Usage:
      rep = check_admissible([scale(mu, lam) for lam in grid], grid, [.1])

    For each lambda: sup_t mu_lambda(t), the products
    V_0^q[mu_lambda] * q with q = q[mu_lambda](1 - eps) for each eps, and
    the whole line variation of mu_lambda^p. Flags: the sups decrease
    towards the finest lambda and end below sup_tol; every product is
    below product_bound; the p-variations decrease and end below sup_tol.
    """
    grid = tuple(float(x) for x in grid)
    eps_grid = tuple(float(e) for e in eps_grid)
    if len(family) != len(grid):
        raise InputError("family and grid differ in length")
    if not all(0.0 < e < 1.0 for e in eps_grid):
        raise InputError("every epsilon must lie in (0, 1)")
    sups = np.array([mu.sup() for mu in family])
    products = np.empty((len(grid), len(eps_grid)))
    for i, mu in enumerate(family):
        for j, eps in enumerate(eps_grid):
            q = mu.quantile(1.0 - eps)
            products[i, j] = total_variation(mu, 0.0, q) * q
    pvars = np.array([mu.power_variation(p) for mu in family])
    #Coarse to fine
    order = np.argsort(grid)[::-1]

    def vanishing(vals):
        seq = vals[order]
        return bool(np.all(np.diff(seq) <= exact_tol * np.maximum(1.0, seq[:-1]))
                    and seq[-1] <= sup_tol)

    return AdmissibilityReport(grid=grid, eps_grid=eps_grid, sups=sups,
                               products=products, power_variations=pvars,
                               sup_vanishing=vanishing(sups),
                               products_bounded=bool(np.all(products <= product_bound)),
                               variation_vanishing=vanishing(pvars))


def _sample_points(rho, lam):
    end = rho.support_end()
    if math.isinf(end):
        end = rho.quantile(1.0 - 1e-9)
    pts = np.linspace(0.0, end, sup_samples)
    bp = rho.breakpoints()
    left = np.nextafter(bp, -np.inf)
    return np.concatenate((pts, bp, left[left >= 0.0]))


def check_test_family(family, grid, eps):
    """
    rho_lambda(0) = lambda >= rho_lambda(t), sampled on 1000 points plus
    breakpoints, and the largest delta in [0, 1] with
    rho_lambda(T) >= lambda (1 - eps) for all T < delta/lambda.
    """
    grid = tuple(float(x) for x in grid)
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise InputError("eps must lie in (0, 1)")
    if len(family) != len(grid):
        raise InputError("family and grid differ in length")
    peak_ok, bounded_ok, deltas = [], [], []
    for rho, lam in zip(family, grid):
        slack = exact_tol * max(1.0, lam)
        peak_ok.append(bool(abs(float(rho.pdf(0.0)) - lam) <= slack))
        vals = rho.pdf(_sample_points(rho, lam))
        bounded_ok.append(bool(np.all(vals <= lam + slack)))
        floor = lam * (1.0 - eps)
        deltas.append(bisect_predicate(
            lambda d: d == 0.0 or rho.infimum_before(d / lam) >= floor, 0.0, 1.0))
    return FamilyTestReport(grid=grid, epsilon=eps, peak_ok=peak_ok,
                            bounded_ok=bounded_ok, deltas=np.array(deltas))


def shift_spot_check(game, family, grid, r0, u_star, tail_eps):
    """
    Deviation from u_star of V[shift(rho_lambda, T)] for T at the
    quartiles 1/4, 1/2, 3/4 of q[rho_lambda](r0). This samples the shift
    uniformity in the test-family condition; it does not take a sup.
    Rows are (lambda, T, deviation).
    """
    u_star = np.asarray(u_star, dtype=float)
    rows = []
    for rho, lam in zip(family, grid):
        q = rho.quantile(r0)
        for f in spot_fractions:
            T = f * q
            br = value_backward(game, shift(rho, T), tail_eps)
            rows.append((float(lam), float(T), br.deviation(u_star)))
    return rows


def lower_bound_check(game, mu, u_star, epsilon, tail_eps):
    """
    V[mu] - (u_star - 12 eps) per state, using the bracket's lower end.
    Nonnegative entries mean the one-sided estimate holds.
    """
    br = value_backward(game, mu, tail_eps)
    return br.lo - (np.asarray(u_star, dtype=float) - 12.0 * epsilon)


def cesaro_ratio_gap(game, n, r):
    """
    (sup |V_m - V_n|, 2(r-1) + 2/n) for the equal-weight values with
    m = round(n r), r in (1, 2].
    """
    n, r = int(n), float(r)
    if not 1.0 < r <= 2.0:
        raise InputError("r must lie in (1, 2], got %r" % (r,))
    m = int(round(n * r))
    gap = float(np.max(np.abs(cesaro_finite(game, m) - cesaro_finite(game, n))))
    return gap, 2.0 * (r - 1.0) + 2.0 / n


def discrete_shift_gap(z, rho, g, r):
    """
    (|c_rho(z) - tail(r) c_shift(rho, r)(z)|, V_0^inf[rho]) for a step
    process z and r in (0, 1)
    """
    r = float(r)
    if not 0.0 < r < 1.0:
        raise InputError("r must lie in (0, 1), got %r" % (r,))
    here = step_payoff(z, rho, g)
    later = step_payoff(z, shift(rho, r), g)
    gap = abs(here - float(rho.tail(r)) * later)
    return gap, total_variation(rho, 0.0)
