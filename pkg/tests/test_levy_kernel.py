import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from sbmlab.bernstein import stable_spec
from sbmlab.functionals import truncated_profile_functional
from sbmlab.levy_kernel import (
    check_j_bounds,
    jump_density,
    jump_density_table,
    kato_integral,
    levy_measure_density,
    levy_system_rate,
    levy_tail_mass,
    small_jump_drift,
    stable_jump_constant,
)


def test_stable_jump_constant():
    # A(d, 2 alpha) = alpha 4^alpha Gamma(d/2 + alpha) / (pi^{d/2} Gamma(1 - alpha))
    a = stable_jump_constant(1, 0.4)
    ref = 0.4 * 4 ** 0.4 * gamma_fn(0.5 + 0.4) / (np.pi ** 0.5 * gamma_fn(0.6))
    assert a == pytest.approx(ref, rel=1e-14)


def test_levy_measure_density_stable(stable04):
    t = np.geomspace(1e-3, 1e3, 11)
    ref = 0.4 / gamma_fn(0.6) * t ** -1.4
    assert np.allclose(levy_measure_density(stable04, t), ref, rtol=1e-12)


def test_tail_mass_and_drift(stable04):
    eps = 0.01
    assert levy_tail_mass(stable04, eps) == pytest.approx(
        eps ** -0.4 / gamma_fn(0.6), rel=1e-10)
    # int_0^eps t mu(t) dt = eps^{1-alpha} alpha / (Gamma(1-alpha) (1-alpha))
    assert small_jump_drift(stable04, eps) == pytest.approx(
        0.4 * eps ** 0.6 / (gamma_fn(0.6) * 0.6), rel=1e-8)


@pytest.mark.parametrize("d,alpha", [(1, 0.4), (3, 0.75)])
def test_quadrature_matches_closed_form(d, alpha):
    spec = stable_spec(alpha)
    r = np.geomspace(0.01, 100.0, 7)
    jq = np.asarray(jump_density(spec, d, r, use_closed_form=False))
    jc = np.asarray(jump_density(spec, d, r, use_closed_form=True))
    assert np.allclose(jq, jc, rtol=1e-7)


def test_j_bound_shape_stable_constant(stable04):
    rep = check_j_bounds(stable04, 1, np.geomspace(1e-4, 1.0, 40))
    assert rep.details["band"] == pytest.approx(1.0, abs=1e-9)


def test_j_bound_shape_mixture_band(mixture):
    rep = check_j_bounds(mixture, 1, np.geomspace(1e-4, 1.0, 40))
    assert np.isfinite(rep.estimate)
    assert rep.details["band"] < 10.0


def test_jump_density_table_interpolation(stable04):
    tab = jump_density_table(stable04, 1, np.geomspace(1e-6, 1e3, 120))
    r = np.geomspace(1e-5, 500.0, 23)
    exact = np.asarray(jump_density(stable04, 1, r, use_closed_form=True))
    assert np.allclose(tab.interpolate(r), exact, rtol=2e-3)
    # extrapolation beyond the grid keeps the power-law tail
    big = np.array([5e3, 5e4])
    exact = np.asarray(jump_density(stable04, 1, big, use_closed_form=True))
    assert np.allclose(tab.interpolate(big), exact, rtol=5e-2)


def test_truncated_table_is_smaller(stable04):
    radii = np.geomspace(1e-4, 10.0, 80)
    full = jump_density_table(stable04, 1, radii)
    trunc = jump_density_table(stable04, 1, radii, lower=1e-2)
    assert np.all(trunc.values <= full.values * (1.0 + 1e-6))
    # far from the cut the truncation is invisible
    assert trunc.interpolate(5.0) == pytest.approx(full.interpolate(5.0), rel=1e-2)


def test_levy_system_rate_oracle(stable04):
    # F(y, z) = Phi(|y-z|)^{1.5} wedge 1 = rho^{1.2} wedge 1 in d = 1, and
    # j(rho) = A rho^{-1.8}, so the rate is 2 A (1/0.4 + 1/0.8) at every y
    F = truncated_profile_functional(stable04, 1.5, 1.0)
    a = stable_jump_constant(1, 0.4)
    exact = 2.0 * a * (1.0 / 0.4 + 1.0 / 0.8)
    val = levy_system_rate(stable04, 1, F, np.zeros(1))
    assert val == pytest.approx(exact, rel=1e-3)


def test_levy_system_rate_translation_invariant(stable04):
    F = truncated_profile_functional(stable04, 1.5, 1.0)
    v0 = levy_system_rate(stable04, 1, F, np.zeros(1))
    v1 = levy_system_rate(stable04, 1, F, np.array([7.0]))
    assert v1 == pytest.approx(v0, rel=1e-6)


def test_kato_integral_value(stable04):
    # int_0^1 s^{1.2} / (s^{0.8} s) ds = 1/0.4 = 2.5 for the power profile
    from sbmlab.bernstein import phi_cap

    ftilde = lambda s: np.minimum(np.asarray(phi_cap(stable04, s)) ** 1.5, 1.0)
    value, kind = kato_integral(stable04, ftilde)
    # the quadrature starts at 1e-12, missing (1e-12)^{0.4}/0.4 ~ 4e-5
    assert value == pytest.approx(2.5, rel=1e-4)
    assert kind == "FINITE"
