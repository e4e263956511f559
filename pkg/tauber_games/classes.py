#Class Library
import math
from dataclasses import dataclass, field

import numpy as np

from .consts import root
from .density_calculus import Exponential, Uniform, scale, shift
from .errors import InvalidParameter

__all__ = ["ValueBracket", "FamilySpec", "FamilyTable", "EquivalenceReport",
           "AdmissibilityReport", "FamilyTestReport", "family_kinds",
           "gather_table"]

#Families whose grid points are densities indexed by a time horizon T
#(finest = largest) or by a rate lambda (finest = smallest)
horizon_kinds = ("cesaro", "cesaro_discrete", "power_shift")
rate_kinds = ("abel", "scaled")
family_kinds = horizon_kinds + rate_kinds


@dataclass(frozen=True)
class ValueBracket:
    """
    Per state interval [lo, hi] holding the exact weighted value; the
    width is at most the truncated tail mass.
    """
    lo: np.ndarray
    hi: np.ndarray
    tail: float = 0.0

    @property
    def midpoint(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self):
        return float(np.max(self.hi - self.lo))

    def contains(self, v, tol=0.0):
        v = np.asarray(v, dtype=float)
        return bool(np.all(self.lo - tol <= v) and np.all(v <= self.hi + tol))

    def overlaps(self, other, tol=0.0):
        return bool(np.all(self.lo <= other.hi + tol)
                    and np.all(other.lo <= self.hi + tol))

    def deviation(self, u):
        """Sup-norm distance of the midpoint from u"""
        return float(np.max(np.abs(self.midpoint - u)))


class FamilySpec:
    """
    A one-parameter family of densities over a finite grid.

    Usage:
      FamilySpec("abel", [1, .5, .25])
      FamilySpec("power_shift", [1, 10, 100], base=Power(1, 1, 2),
                 tail_eps=1e-2)

    Parameters:
      kind     = cesaro (Uniform(T)), cesaro_discrete (n equal stages),
                 abel (Exponential(lambda)), power_shift (shift(base, T)) or
                 scaled (scale(base, lambda))
      grid     = strictly monotone positive grid points
      base     = base density, required by power_shift and scaled
      tail_eps = per-family truncation overriding the experiment's
      label    = name used in reports, defaults to kind
    """

    def __init__(self, kind, grid, base=None, tail_eps=None, label=None):
        if kind not in family_kinds:
            raise InvalidParameter("unknown family kind %r" % (kind,))
        grid = tuple(float(x) for x in grid)
        if not grid:
            raise InvalidParameter("%s: empty grid" % kind)
        arr = np.array(grid)
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
            raise InvalidParameter("%s: grid points must be finite and positive" % kind)
        steps = np.diff(arr)
        if not (np.all(steps > 0.0) or np.all(steps < 0.0)):
            raise InvalidParameter("%s: grid must be strictly monotone" % kind)
        if kind == "cesaro_discrete" and not all(x == math.floor(x) for x in grid):
            raise InvalidParameter("cesaro_discrete: grid points must be integers")
        if kind in ("power_shift", "scaled") and base is None:
            raise InvalidParameter("%s: a base density is required" % kind)
        if kind == "power_shift" and base.kind != "power":
            raise InvalidParameter("power_shift: base must be a power density")
        if tail_eps is not None and not 0.0 <= float(tail_eps) < 1.0:
            raise InvalidParameter("%s: tail_eps must lie in [0, 1)" % kind)
        self.kind = kind
        self.grid = grid
        self.base = base
        self.tail_eps = None if tail_eps is None else float(tail_eps)
        self.label = label or kind

    def density(self, point):
        if self.kind in ("cesaro", "cesaro_discrete"):
            return Uniform(point)
        if self.kind == "abel":
            return Exponential(point)
        if self.kind == "power_shift":
            return shift(self.base, point)
        return scale(self.base, point)

    def densities(self):
        return [self.density(x) for x in self.grid]

    @property
    def finest_index(self):
        arr = np.array(self.grid)
        return int(np.argmax(arr) if self.kind in horizon_kinds else np.argmin(arr))

    def describe(self):
        out = {"kind": self.kind, "grid": list(self.grid), "label": self.label}
        if self.base is not None:
            out["base"] = self.base.describe()
        if self.tail_eps is not None:
            out["tail_eps"] = self.tail_eps
        return out

    def __repr__(self):
        return "FamilySpec(%r, %d points)" % (self.label, len(self.grid))


@dataclass
class FamilyTable:
    """Brackets of one family, in grid order"""
    spec: FamilySpec
    brackets: list

    @property
    def points(self):
        return self.spec.grid

    def finest(self):
        return self.brackets[self.spec.finest_index]

    def __iter__(self):
        return iter(zip(self.spec.grid, self.brackets))

    def __len__(self):
        return len(self.brackets)


@dataclass
class EquivalenceReport:
    u_star: np.ndarray
    u_star_disagreement: float
    tables: dict
    deviations: dict
    verdicts: dict
    tol: float
    tail_eps: float

    @property
    def passed(self):
        return all(self.verdicts.values())

    def rows(self):
        """(family, grid_point, state, lo, hi, deviation) in grid order"""
        for label, table in self.tables.items():
            for point, br in table:
                dev = np.abs(br.midpoint - self.u_star)
                for w in range(br.lo.size):
                    yield (label, point, w, float(br.lo[w]), float(br.hi[w]),
                           float(dev[w]))

    def summary(self):
        return {
            "u_star": self.u_star.tolist(),
            "u_star_disagreement": self.u_star_disagreement,
            "tol": self.tol,
            "tail_eps": self.tail_eps,
            "families": {
                label: {
                    "spec": table.spec.describe(),
                    "finest_point": table.spec.grid[table.spec.finest_index],
                    "finest_deviation": self.deviations[label][table.spec.finest_index],
                    "finest_width": table.finest().width,
                    "verdict": "PASS" if self.verdicts[label] else "FAIL",
                }
                for label, table in self.tables.items()
            },
        }


@dataclass
class AdmissibilityReport:
    grid: tuple
    eps_grid: tuple
    sups: np.ndarray
    products: np.ndarray
    power_variations: np.ndarray
    sup_vanishing: bool
    products_bounded: bool
    variation_vanishing: bool

    @property
    def max_products(self):
        """max over lambda of the TV-quantile product, per epsilon"""
        return self.products.max(axis=0)


@dataclass
class FamilyTestReport:
    grid: tuple
    epsilon: float
    peak_ok: list
    bounded_ok: list
    deltas: np.ndarray
    delta: float = field(init=False)

    def __post_init__(self):
        self.delta = float(np.min(self.deltas))

    @property
    def property_zero(self):
        return all(self.peak_ok) and all(self.bounded_ok)


def gather_table(spec, local, comm):
    """
    Collect (index, bracket) pairs computed on each rank into one
    FamilyTable on the root, ordered by grid index. Other ranks get None.
    """
    pieces = comm.gather(local, root=root)
    if comm.rank != root:
        return None
    merged = sorted((item for part in pieces for item in part), key=lambda t: t[0])
    return FamilyTable(spec, [br for _, br in merged])
