#!/usr/bin/env python
"""
This example script reads a piecewise constant density from a CSV file
(breakpoint,level rows; the last row closes the support) and prints its
value brackets on every builtin game, together with a construction audit.
"""
import sys

import tauber_games as tg
from tabulate import tabulate


def run_values(filename, tail_eps=1e-9):
    rho = tg.parse_density("pc:" + filename)
    rows = []
    for name in tg.builtin_names():
        br = tg.value_backward(tg.builtin(name), rho, tail_eps)
        for w in range(br.lo.size):
            rows.append((name, w, br.lo[w], br.hi[w]))
    print(tabulate(rows, headers=("game", "state", "lo", "hi"), floatfmt=".12g"))

    report = tg.construction_audit(rho, epsilon=0.05, M=2.0, r0=0.25)
    print(tabulate(sorted(report.items()), headers=("quantity", "value")))


if __name__ == '__main__':
    run_values(sys.argv[1] if len(sys.argv) > 1 else "density.csv")
