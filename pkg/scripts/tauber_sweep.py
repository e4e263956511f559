#!/usr/bin/env python
"""
This example script runs the five value families on a builtin game and
checks that they approach one limit. Run it serially, or distribute the
grid points with

    mpirun -np 4 python tauber_sweep.py
"""
import numpy as np
import tauber_games as tg

try:
    from mpi4py import MPI
    comm = MPI.COMM_WORLD
except ImportError:
    comm = None


def run_sweep():
    #Parameters
    game_name = "swap2"
    tail_eps = 1e-9
    tol = 0.02
    lo_exp, hi_exp = 0, 12

    game = tg.builtin(game_name)
    horizons = tg.funcs.dyadic_grid(lo_exp, hi_exp)
    rates = tg.funcs.dyadic_grid(lo_exp, hi_exp, inverse=True)
    base = tg.Power(1.0, 1.0, 2.0)
    approx, err = tg.pc_approximate(tg.Exponential(1.0), 64)

    specs = [
        tg.FamilySpec("cesaro_discrete", horizons),
        tg.FamilySpec("cesaro", horizons),
        tg.FamilySpec("abel", rates),
        #Slow tails: truncate coarsely to stay under the horizon cap
        tg.FamilySpec("power_shift", horizons, base=base, tail_eps=1e-2),
        tg.FamilySpec("scaled", rates, base=approx),
    ]

    S = tg.TauberSystem(game, tail_eps, comm=comm, verbose=True)
    report = S.equivalence_report(specs, tol)

    if report is not None:
        #One file per family: grid point vs deviation from the limit
        for label, table in report.tables.items():
            outfile = game_name + "_" + label + "_deviation.txt"
            np.savetxt(outfile, np.vstack((np.array(table.points),
                                           np.array(report.deviations[label]))).T,
                       delimiter=' ')
        print("u_star:", report.u_star, "disagreement:", report.u_star_disagreement)
        print("pc approximation L1 error:", err)
        for label, ok in report.verdicts.items():
            print(label, "PASS" if ok else "FAIL")


if __name__ == '__main__':
    run_sweep()
