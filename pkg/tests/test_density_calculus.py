import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import tauber_games as tg
from tauber_games.funcs import integrate, make_rng

from conftest import random_density

rates = st.floats(min_value=0.01, max_value=10.0)
times = st.floats(min_value=0.0, max_value=2.0)


@settings(max_examples=300, deadline=None)
@given(rates, times)
def test_exponential_is_memoryless(lam, T):
    rho = tg.Exponential(lam)
    assert tg.same_density(tg.shift(rho, T), rho)


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=0.1, max_value=100.0), st.floats(min_value=0.0, max_value=0.99))
def test_uniform_shift_shortens_support(T, frac):
    s = frac * T
    assert tg.same_density(tg.shift(tg.Uniform(T), s), tg.Uniform(T - s), rtol=1e-9)


@settings(max_examples=300, deadline=None)
@given(rates)
def test_scale_of_unit_exponential_and_uniform(lam):
    assert tg.same_density(tg.scale(tg.Exponential(1.0), lam), tg.Exponential(lam))
    assert tg.same_density(tg.scale(tg.Uniform(1.0), lam), tg.Uniform(1.0 / lam))


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=0.1, max_value=10.0), st.floats(min_value=0.1, max_value=10.0),
       st.floats(min_value=1.1, max_value=3.0), st.floats(min_value=0.0, max_value=100.0))
def test_power_shift_is_a_rescaling(alpha, beta, gamma, T):
    rho = tg.Power(alpha, beta, gamma)
    shifted = tg.shift(rho, T)
    scaled = tg.scale(rho, alpha / (alpha + beta * T))
    assert tg.same_density(shifted, scaled, rtol=1e-12)


def test_identities_on_seeded_parameters():
    rng = make_rng(1000)
    for _ in range(1000):
        lam, T = rng.uniform(0.01, 5.0), rng.uniform(0.0, 3.0)
        a, b, g = rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0), rng.uniform(1.1, 4.0)
        assert tg.same_density(tg.shift(tg.Exponential(lam), T), tg.Exponential(lam))
        assert tg.same_density(tg.scale(tg.scale(tg.Exponential(1.0), lam), T + 1.0),
                               tg.Exponential(lam * (T + 1.0)), rtol=1e-12)
        P = tg.Power(a, b, g)
        assert tg.same_density(tg.shift(P, T), tg.scale(P, a / (a + b * T)), rtol=1e-12)


def test_piecewise_identities_in_l1(rng):
    for _ in range(50):
        rho = random_density(rng)
        if rho.kind != "pc":
            continue
        s, t = rng.uniform(0.0, 0.4), rng.uniform(0.0, 0.4)
        assert tg.l1_distance(tg.shift(tg.shift(rho, s), t), tg.shift(rho, s + t)) <= 1e-9
        a, b = rng.uniform(0.2, 5.0), rng.uniform(0.2, 5.0)
        assert tg.l1_distance(tg.scale(tg.scale(rho, a), b), tg.scale(rho, a * b)) <= 1e-9


def test_quantiles():
    assert tg.quantile(tg.Uniform(4.0), 0.5) == pytest.approx(2.0)
    assert tg.quantile(tg.Exponential(math.log(2.0)), 0.5) == pytest.approx(1.0)
    assert tg.quantile(tg.Power(1.0, 1.0, 2.0), 0.5) == pytest.approx(1.0)
    pc = tg.PiecewiseConstant([0.0, 1.0, 3.0], [0.5, 0.25])
    assert tg.quantile(pc, 0.75) == pytest.approx(2.0)


def test_quantile_inverts_cdf(densities):
    for rho in densities:
        for r in (0.01, 0.3, 0.5, 0.9, 0.999):
            assert tg.cdf(rho, tg.quantile(rho, r)) == pytest.approx(r, abs=1e-12)


def test_cdf_matches_quadrature(densities):
    for rho in densities:
        pts = list(rho.breakpoints())
        for t in (0.5, 3.0, 9.0):
            inner = [p for p in pts if 0.0 < p < t] or None
            val = integrate(lambda s: float(rho.pdf(s)), 0.0, t, points=inner)
            assert tg.cdf(rho, t) == pytest.approx(val, abs=1e-9)


def test_total_variation_closed_forms():
    assert tg.total_variation(tg.Exponential(2.0), 0.0) == pytest.approx(2.0)
    assert tg.total_variation(tg.Uniform(4.0), 0.0) == pytest.approx(0.25)
    assert tg.total_variation(tg.Uniform(4.0), 0.0, 3.0) == 0.0
    assert tg.total_variation(tg.Power(1.0, 1.0, 2.0), 0.0) == pytest.approx(1.0)
    pc = tg.PiecewiseConstant([0.0, 1.0, 2.0], [0.25, 0.75])
    assert tg.total_variation(pc, 0.0) == pytest.approx(0.5 + 0.75)


def test_l1_distance_closed_forms():
    assert tg.l1_distance(tg.Uniform(1.0), tg.Uniform(2.0)) == pytest.approx(1.0, abs=1e-12)
    #Crossing at ln 2, a quarter of mass on each side
    assert tg.l1_distance(tg.Exponential(1.0), tg.Exponential(2.0)) == \
        pytest.approx(0.5, abs=1e-9)
    rho = tg.Power(1.0, 1.0, 2.0)
    assert tg.l1_distance(rho, rho) == 0.0


def test_l1_distance_matches_quadrature():
    rho, nu = tg.Exponential(1.0), tg.Uniform(3.0)
    val = integrate(lambda t: abs(float(rho.pdf(t) - nu.pdf(t))), 0.0, 3.0,
                    points=[-math.log(1.0 / 3.0)]) + float(rho.tail(3.0))
    assert tg.l1_distance(rho, nu) == pytest.approx(val, abs=1e-8)


def test_stage_weights_and_horizon():
    w, tail = tg.stage_weights(tg.Uniform(4.0), 4)
    assert np.allclose(w, 0.25) and tail == 0.0
    assert tg.horizon(tg.Exponential(math.log(2.0)), 1e-9) == 30
    assert tg.horizon(tg.Uniform(4.0), 0.0) == 4
    with pytest.raises(tg.TailNeverSmall):
        tg.horizon(tg.Power(1.0, 1.0, 2.0), 1e-9)


def test_same_density_uses_canonical_power_parameters():
    assert tg.same_density(tg.Power(1.0, 1.0, 2.0), tg.Power(2.0, 2.0, 2.0))
    assert not tg.same_density(tg.Power(1.0, 1.0, 2.0), tg.Power(1.0, 2.0, 2.0))
    assert not tg.same_density(tg.Uniform(1.0), tg.Exponential(1.0))


def test_parse_density_grammar(tmp_path):
    rho = tg.parse_density("power:1,1,2|shift:10|scale:0.5")
    assert tg.same_density(rho, tg.Power(11.0, 0.5, 2.0))
    path = tmp_path / "rho.csv"
    path.write_text("0,2\n0.25,1\n0.5,0\n")
    pc = tg.parse_density("pc:%s" % path)
    assert pc.kind == "pc"
    assert tg.cdf(pc, 0.25) == pytest.approx(2.0 / 3.0)
    assert tg.same_density(tg.parse_density("uniform:4|shift:1"), tg.Uniform(3.0))


@pytest.mark.parametrize("text", ["exp:0", "power:1,1,1", "uniform:-1", "beta:1",
                                  "exp:1|twist:2", "power:1,2", "uniform"])
def test_parse_density_names_the_bad_token(text):
    with pytest.raises(tg.DensityParseError) as err:
        tg.parse_density(text)
    assert err.value.exit_code == 2
    assert err.value.token in text


def test_construction_errors():
    with pytest.raises(tg.NonPositiveParameter):
        tg.Uniform(0.0)
    with pytest.raises(tg.NonPositiveParameter):
        tg.Exponential(-1.0)
    with pytest.raises(tg.GammaNotGreaterThanOne):
        tg.Power(1.0, 1.0, 1.0)
    with pytest.raises(tg.MassNotOne):
        tg.PiecewiseConstant([0.0, 1.0], [0.9])
    assert tg.PiecewiseConstant([0.0, 1.0], [0.9], renormalize=True).levels[0] == 1.0


def test_calculus_errors():
    rho = tg.Exponential(1.0)
    with pytest.raises(tg.NegativeTime):
        tg.cdf(rho, -1.0)
    with pytest.raises(tg.QuantileOutOfRange):
        tg.quantile(rho, 1.0)
    with pytest.raises(tg.QuantileOutOfRange):
        tg.quantile(rho, 0.0)
    with pytest.raises(tg.EmptyInterval):
        tg.total_variation(rho, 2.0, 1.0)
    with pytest.raises(tg.ZeroTailMass):
        tg.shift(tg.Uniform(2.0), 2.0)
    with pytest.raises(tg.NonPositiveParameter):
        tg.scale(rho, 0.0)


def test_variation_helpers():
    pc = tg.PiecewiseConstant([0.0, 1.0, 2.0, 3.0], [0.5, 0.25, 0.25])
    assert pc.infimum_before(1.0) == 0.5
    assert pc.infimum_before(2.5) == 0.25
    assert tg.log_variation(pc, 0.0, 3.0) == pytest.approx(math.log(2.0))
    assert np.allclose(pc.log_variations([0.0, 0.5, 1.5, 3.0]), [0.0, math.log(2.0), 0.0])
    assert math.isinf(tg.log_variation(pc, 0.0, 4.0))
    assert pc.power_variation(1.0) == pytest.approx(0.5)
    assert tg.Exponential(3.0).sup() == 3.0
    assert tg.Power(1.0, 1.0, 2.0).sup() == pytest.approx(1.0)


def test_shift_and_scale_keep_unit_mass(rng):
    for _ in range(1000):
        rho = random_density(rng)
        T = rng.uniform(0.0, rho.quantile(0.5))
        lam = rng.uniform(0.2, 5.0)
        for out in (tg.shift(rho, T), tg.scale(rho, lam), tg.scale(tg.shift(rho, T), lam)):
            Q = out.quantile(1.0 - 1e-6)
            inner = [p for p in out.breakpoints() if 0.0 < p < Q] or None
            mass = integrate(lambda s: float(out.pdf(s)), 0.0, Q, points=inner)
            assert abs(mass + float(out.tail(Q)) - 1.0) <= 1e-9
            if out.kind == "pc":
                assert abs(math.fsum(out.masses) - 1.0) <= 1e-9


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=0.1, max_value=10.0), st.floats(min_value=0.1, max_value=10.0),
       st.floats(min_value=1.1, max_value=5.0), st.floats(min_value=0.0, max_value=1000.0))
def test_power_tail_mass(alpha, beta, gamma, T):
    rho = tg.Power(alpha, beta, gamma)
    expected = alpha ** (gamma - 1.0) / (alpha + beta * T) ** (gamma - 1.0)
    assert tg.tail(rho, T) == pytest.approx(expected, rel=1e-10)
    assert 1.0 - tg.cdf(rho, T) == pytest.approx(expected, rel=1e-9, abs=1e-15)


def test_quantile_inverts_cdf_on_the_percentile_grid(densities):
    levels = np.arange(1, 100) / 100.0
    for rho in densities:
        q = np.array([tg.quantile(rho, r) for r in levels])
        assert np.all(np.diff(q) > 0.0)
        assert np.allclose([tg.cdf(rho, t) for t in q], levels, rtol=0.0, atol=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=0.1, max_value=100.0), st.floats(min_value=0.05, max_value=20.0),
       st.floats(min_value=0.05, max_value=20.0))
def test_scale_semigroup_for_uniform_and_power(T, a, b):
    U = tg.Uniform(T)
    assert tg.same_density(tg.scale(tg.scale(U, a), b), tg.scale(U, a * b), rtol=1e-12)
    P = tg.Power(1.0 + T, 0.5 * T, 1.0 + a)
    assert tg.same_density(tg.scale(tg.scale(P, a), b), tg.scale(P, a * b), rtol=1e-12)
    assert tg.same_density(tg.scale(P, 1.0), P)


def test_construct_examples():
    rho = tg.construct("uniform", 1.0)
    assert tg.same_density(rho, tg.Uniform(1.0))
    assert float(rho.pdf(0.5)) == 1.0 and float(rho.pdf(1.5)) == 0.0
    rho = tg.construct("power", 1.0, 1.0, 2.0)
    assert np.allclose(rho.pdf([0.0, 1.0, 3.0]), [1.0, 0.25, 1.0 / 16.0])
    assert tg.cdf(rho, 1.0) == pytest.approx(0.5)
    with pytest.raises(tg.NonPositiveParameter):
        tg.construct("exp", 0.0)
    assert tg.construct("exp", 2.0) == tg.Exponential(2.0)


def test_construct_step_densities():
    with pytest.raises(tg.MassNotOne):
        tg.construct("pc", [0.0, 1.0], [0.9], renormalize=False)
    pc = tg.construct("pc", [0.0, 1.0, 3.0], [2.0, 1.0], renormalize=True)
    assert np.allclose(pc.levels, [0.5, 0.25])
    with pytest.raises(tg.InputError):
        tg.construct("beta", 1.0, 2.0)


def test_parse_density_agrees_with_construct():
    assert tg.parse_density("power:2,3,4") == tg.construct("power", 2.0, 3.0, 4.0)
    assert tg.parse_density("exponential:0.5") == tg.construct("exp", 0.5)


def test_step_density_descriptions_are_plain_floats():
    pc = tg.PiecewiseConstant(np.array([0.0, 1.0, 3.0]), np.array([0.5, 0.25]))
    assert pc.describe() == "pc:2 pieces on [0.0,3.0)"
    assert repr(pc) == "PiecewiseConstant(2 pieces on [0.0, 3.0))"
    with pytest.raises(tg.EmptyInterval) as err:
        tg.total_variation(pc, np.float64(2.0), np.float64(1.0))
    assert "np." not in str(err.value)
