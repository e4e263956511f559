import numpy as np
import pytest

import tauber_games as tg
from tauber_games.constructions import (ProofConstants, construction_audit, pc_approximate,
                                        proof_constants, quantile_partition,
                                        regularize_support, tv_correct)


def spike():
    """Flat density on [0, 1) with a level-3 spike on [0.05, 0.1)"""
    c = 0.85 / 0.95
    return tg.PiecewiseConstant([0.0, 0.05, 0.1, 1.0], [c, 3.0, c], renormalize=True)


def test_proof_constants_minimal_k():
    c = proof_constants(0.1, 2.0, 0.25)
    assert c.k == 210
    assert c.step_one_holds()
    assert not ProofConstants.from_k(0.1, 209, 2.0, 0.25).step_one_holds()
    assert c.delta == 1.0 - c.p
    assert c.kappa == pytest.approx(c.epsilon * c.delta)
    assert c.p ** c.pieces == pytest.approx(0.1, rel=1e-10)


def test_geometric_identity():
    for eps, M in ((0.1, 2.0), (0.1, 1.5)):
        c = proof_constants(eps, M, 0.25)
        assert abs(c.geometric_mass() - (1.0 - eps)) <= 1e-12


@pytest.mark.parametrize("eps,M,r0", [(0.2, 2.0, 0.25), (0.1, 1.0, 0.25),
                                      (0.05, 2.0, 0.5), (0.0, 2.0, 0.25)])
def test_proof_constants_reject_bad_parameters(eps, M, r0):
    with pytest.raises(tg.InvalidParameter):
        proof_constants(eps, M, r0)


@pytest.mark.parametrize("n", [4, 10, 16, 100, 1000])
def test_pc_approximate_error_bound(densities, n):
    for rho in densities + [tg.Exponential(1.0), tg.Uniform(1.0), tg.Power(1.0, 1.0, 2.0)]:
        mu, err = pc_approximate(rho, n)
        assert err <= 5.0 / n
        assert mu.cdf(mu.support_end()) == pytest.approx(1.0, abs=1e-12)
        assert mu.b[0] == pytest.approx(rho.quantile(1.0 / n))
        assert mu.b[-1] == pytest.approx(rho.quantile(1.0 - 1.0 / n))


def test_pc_approximate_uniform_exactly():
    mu, err = pc_approximate(tg.Uniform(1.0), 10)
    assert np.allclose(mu.levels, 1.25)
    assert err == pytest.approx(0.4, abs=1e-12)


def test_pc_approximate_needs_four_bins():
    with pytest.raises(tg.BinCountTooSmall):
        pc_approximate(tg.Exponential(1.0), 3)


@pytest.mark.parametrize("rho", [tg.Exponential(1.0), tg.Uniform(1.0)])
def test_regularize_support(rho):
    eps = 0.05
    mu = regularize_support(rho, eps)
    Q = rho.quantile(1.0 - eps)
    assert mu.support_end() == pytest.approx(Q)
    assert mu._cum[-1] == pytest.approx(1.0, abs=1e-12)
    assert mu.infimum_before(Q) >= eps / Q - 1e-12
    assert tg.l1_distance(mu, rho) <= 2.0 * eps + 1e-9


def partition_cases():
    return [tg.Uniform(1.0), tg.Exponential(1.0), tg.Power(1.0, 1.0, 2.0),
            tg.PiecewiseConstant([0.0, 1.0, 2.0, 3.0], [0.5, 0.3, 0.2])]


@pytest.mark.parametrize("mu", partition_cases(), ids=lambda m: m.kind)
def test_quantile_partition_masses(mu):
    c = ProofConstants.from_k(0.1, 3)
    part = quantile_partition(mu, c)
    assert part.tau.size == 10
    assert part.tau[0] == 0.0
    assert np.all(np.diff(part.tau) > 0.0)
    assert np.allclose(part.masses, part.expected_masses(), rtol=0.0, atol=1e-9)
    assert part.masses.sum() == pytest.approx(0.9, abs=1e-9)
    assert np.allclose(part.lambdas * np.diff(part.tau), part.masses)


def test_quantile_partition_uniform_points():
    c = ProofConstants.from_k(0.1, 2)
    part = quantile_partition(tg.Uniform(1.0), c)
    assert np.allclose(part.tau[1:], 1.0 - c.p ** np.arange(1, 5))


def test_quantile_partition_degenerate_interval():
    #All the mass sits within 64 units past 1e16, where spacing is 2
    mu = tg.PiecewiseConstant([1e16, 1e16 + 64.0], [1.0 / 64.0])
    with pytest.raises(tg.DegenerateInterval):
        quantile_partition(mu, ProofConstants.from_k(0.1, 10))


def test_tv_correct_flattens_the_spike():
    mu = spike()
    c = ProofConstants.from_k(0.25, 2, M=1.0)
    part = quantile_partition(mu, c)
    assert part.tau[1] > 0.1
    mu_tilde, count = tv_correct(mu, part, 1.0, 2, 0.25)
    assert count == 1
    assert count <= c.k
    assert mu_tilde.cdf(mu_tilde.support_end()) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(mu_tilde.tail(part.tau), mu.tail(part.tau), atol=1e-12)
    assert mu_tilde.pdf(0.07) == pytest.approx(part.lambdas[0])
    l1 = tg.l1_distance(mu_tilde, mu)
    assert l1 == pytest.approx(0.16, abs=0.01)
    assert l1 <= 2.0 * 0.25


def test_tv_correct_leaves_smooth_pieces_alone():
    mu = tg.Exponential(1.0)
    part = quantile_partition(mu, ProofConstants.from_k(0.1, 3))
    mu_tilde, count = tv_correct(mu, part, 10.0, 3, 0.1)
    assert count == 0
    assert mu_tilde is mu


def test_tv_correct_closed_form_needs_step_density():
    mu = tg.Exponential(1.0)
    part = quantile_partition(mu, ProofConstants.from_k(0.1, 3))
    with pytest.raises(tg.NotPiecewiseConstant):
        tv_correct(mu, part, 0.01, 3, 0.1)


def test_tv_correct_rejects_gaps():
    mu = tg.PiecewiseConstant([0.0, 1.0, 2.0, 3.0], [0.5, 0.0, 0.5])
    part = quantile_partition(mu, ProofConstants.from_k(0.1, 2))
    with pytest.raises(tg.NonPositiveDensityOnSupport):
        tv_correct(mu, part, 1.0, 2, 0.1)


def test_construction_audit_on_uniform():
    c = ProofConstants.from_k(0.1, 3, M=2.0, r0=0.25)
    report = construction_audit(tg.Uniform(1.0), 0.1, 2.0, 0.25, n=10, constants=c)
    assert report["k"] == 3
    assert report["regularized_mass"] == pytest.approx(1.0, abs=1e-12)
    assert report["regularized_l1"] <= report["regularized_l1_bound"] + 1e-9
    assert report["partition_pieces"] == 9
    assert report["partition_mass_error"] <= 1e-9
    assert report["incorrect_count"] == 0
    assert report["corrected_l1"] == 0.0
    assert report["corrected_mass_ok"]
    assert report["pc_l1"] <= report["pc_l1_bound"]
    assert report["geometric_identity_error"] <= 1e-12
    assert report["log_variation_total"] <= 1e-6
