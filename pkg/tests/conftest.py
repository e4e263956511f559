import numpy as np
import pytest

import tauber_games as tg

#The four games every harness property is checked on
core_games = ("swap2", "lazy2", "ergodic3", "mdp_reach")


def four_kinds():
    """One density of each kind, all with support past t = 10"""
    return [
        tg.Uniform(12.0),
        tg.Exponential(0.5),
        tg.Power(1.0, 1.0, 3.0),
        tg.PiecewiseConstant([0.0, 4.0, 8.0, 16.0], [0.1, 0.1, 0.025]),
    ]


def random_density(rng):
    kind = rng.integers(4)
    if kind == 0:
        return tg.Uniform(rng.uniform(1.0, 20.0))
    if kind == 1:
        return tg.Exponential(rng.uniform(0.2, 2.0))
    if kind == 2:
        return tg.Power(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0),
                        rng.uniform(3.0, 5.0))
    edges = np.cumsum(np.concatenate(([0.0], rng.uniform(0.5, 4.0, size=4))))
    return tg.PiecewiseConstant(edges, rng.uniform(0.1, 1.0, size=4),
                                renormalize=True)


@pytest.fixture
def densities():
    return four_kinds()


@pytest.fixture
def rng():
    return tg.funcs.make_rng(20240611)


@pytest.fixture(params=core_games)
def core_game(request):
    return tg.builtin(request.param)


@pytest.fixture(params=tg.builtin_names())
def any_builtin(request):
    return tg.builtin(request.param)
