import math

import numpy as np
import pytest

from spheroidal_eq import energetics as en
from spheroidal_eq.exceptions import BudgetWarning
from spheroidal_eq.potentials import Spheroid
from spheroidal_eq.sampling import stream, uniform_spheroid


def test_second_moment_examples():
    assert en.second_moment(Spheroid(1, 1, 3)) == pytest.approx(3 / 5)
    assert en.second_moment(Spheroid(2, 1, 3)) == pytest.approx(6 / 5)
    assert en.second_moment(Spheroid(1.7, 1.7, 5)) == pytest.approx(1.7**2 * 5 / 7)


def test_second_moment_monte_carlo():
    x = uniform_spheroid(stream(0), 10**6, 2.0, 1.0, 3)
    v = np.sum(x * x, axis=1)
    assert abs(v.mean() - 6 / 5) <= 3 * v.std() / math.sqrt(len(v))


def test_ball_energy_exact_and_mc():
    s = Spheroid(1, 1, 3)
    assert en.interaction_energy(s, 0.0) == pytest.approx(6 / 5, rel=1e-12)
    assert en.spheroid_energy(s, 0.0) == pytest.approx(9 / 5, rel=1e-12)
    for method in ("rays", "pairs"):
        est = en.total_energy(s, 0.0, 200_000, seed=1, method=method)
        assert est.confinement == pytest.approx(3 / 5)
        assert abs(est.interaction - 6 / 5) <= 4 * est.stderr


def test_energy_scaling():
    s = Spheroid(0.7, 1.1, 3)
    big = Spheroid(1.4, 2.2, 3)
    assert en.interaction_energy(big, 0.0) == pytest.approx(en.interaction_energy(s, 0.0) / 2, rel=1e-12)
    assert en.second_moment(big) == pytest.approx(4 * en.second_moment(s))


def test_mc_energy_matches_exact_anisotropic():
    s = Spheroid(0.6, 1.2, 4)
    est = en.total_energy(s, 1.5, 200_000, seed=2)
    assert abs(est.value - en.spheroid_energy(s, 1.5)) <= 4 * est.stderr


def test_equilibrium_beats_ball(solve):
    sol = solve(1.0, 3)
    ball = Spheroid(1, 1, 3)
    d, err = en.energy_difference(sol.spheroid, ball, 1.0, 200_000, seed=3)
    assert d > 3 * err


def test_el_ball_exact(solve):
    r = en.verify_el1(solve(0.0, 3))
    assert r["interior_max_abs_dev"] <= 1e-8
    assert r["interior_points"] >= 1000


@pytest.mark.parametrize("key", [(1.0, 3), (-0.5, 3)])
def test_el_report_passes(solve, key):
    rep = en.el_report(solve(*key), n_z=200)
    assert rep.interior_rel_dev <= 1e-6
    assert rep.exterior_min_slack >= -1e-8
    assert rep.derivative_min >= -1e-10
    assert rep.smoke_min_slack >= -1e-8
    assert rep.passed()
    assert rep.interior_mean_constant == pytest.approx(rep.c_alpha, rel=1e-6)
    assert set(rep.to_dict()) >= {"params", "interior_max_abs_dev", "exterior_min_slack", "derivative_min", "grids"}


@pytest.mark.parametrize("factor", [0.9, 1.1])
def test_el1_negative_control(solve, factor):
    bad = en.perturbed_solution(solve(1.0, 3), factor)
    assert en.verify_el1(bad)["interior_rel_dev"] >= 1e-3


def test_constant_relations_reported(solve):
    # both candidate identities are reported, neither is asserted
    for key in [(1.0, 3), (-0.5, 4), (0.0, 3)]:
        rel = en.constant_relations(solve(*key))
        for name in ("integrated_el_residual", "doubled_energy_residual"):
            assert np.isfinite(rel[name])
    ball = en.constant_relations(solve(0.0, 3))
    assert ball["energy"] == pytest.approx(1.8) and ball["c_alpha"] == pytest.approx(1.5)


def test_cube_integral():
    # |x|^0 over the unit cube is its volume
    assert en.cube_integral(lambda z: np.ones(len(z)), 0.0, 3) == pytest.approx(1.0, rel=1e-12)
    # |x|^2 over the cube: 3 * 1/12
    assert en.cube_integral(lambda z: np.sum(z * z, axis=1), 2.0, 3) == pytest.approx(0.25, rel=1e-12)


def test_gaussian_w_hat_integral_against_real_space():
    # int W_hat exp(-pi xi^2) = int W(x) exp(-pi x^2) dx for a self-dual Gaussian;
    # for alpha = 0, n = 3: 4 pi int r exp(-pi r^2) dr = 2
    assert en.gaussian_w_hat_integral(3, 0.0) == pytest.approx(2.0, rel=1e-12)


def test_parseval_smooth_bump_converges():
    m, h = en.smooth_bump(16, 3)
    coarse = en.parseval_check(m, h, 0.0, bound=1.0)
    m, h = en.smooth_bump(24, 3)
    fine = en.parseval_check(m, h, 0.0, bound=1.0)
    assert fine.rel_diff < coarse.rel_diff < 1e-2
    ref = en.radial_coulomb_energy(lambda r: np.exp(-1 / (1 - r**2)), 1.0, 20000)
    assert fine.real_side == pytest.approx(ref, rel=2e-3)


def test_parseval_two_bump_positive():
    m, h = en.two_bump_difference(24)
    assert abs(m.sum()) < 1e-12
    for alpha in (-0.5, 0.0, 1.0):
        r = en.parseval_check(m, h, alpha, bound=1.0)
        assert r.fourier_side >= 0 and r.real_side >= 0


def test_parseval_sign_change_above_threshold():
    m, h = en.smooth_bump(32, 3, modulation=4, phase=math.pi / 2)
    assert en.parseval_check(m, h, 1.0, bound=np.inf).fourier_side >= 0
    assert en.parseval_check(m, h, 1.1, bound=np.inf).fourier_side < 0


def test_parseval_warns_when_coarse():
    m, h = en.smooth_bump(6, 3)
    with pytest.warns(BudgetWarning):
        en.parseval_check(m, h, 0.0, bound=1e-6)


def test_random_competitors_reproducible(solve):
    sol = solve(1.0, 3)
    a = en.random_competitors(sol, 3, seed=1)
    assert a == en.random_competitors(sol, 3, seed=1)
    assert all(isinstance(c, Spheroid) for c in a)
