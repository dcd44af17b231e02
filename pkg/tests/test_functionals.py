import numpy as np
import pytest

from sbmlab.bernstein import phi_cap
from sbmlab.functionals import (
    CounterexampleSpec,
    accumulate,
    class_check,
    counterexample_hitting_probe,
    expected_functional_mc,
    gauge_estimate,
    gh_partial_sums,
    make_counterexample,
    make_fuchsian,
    radial_rate_table,
    truncated_profile_functional,
    zero_functional,
)
from sbmlab.levy_kernel import levy_system_rate, stable_jump_constant
from sbmlab.sampler import sample_sbm_path


def scalar(F, x, y):
    return float(np.asarray(F(x, y)).ravel()[0])


def test_zero_functional(stable04):
    F = zero_functional(stable04)
    x = np.random.default_rng(0).normal(size=(10, 2))
    assert np.all(np.asarray(F(x, x + 1.0)) == 0.0)


def test_truncated_profile_values(stable04):
    F = truncated_profile_functional(stable04, 1.5, 2.0)
    x = np.zeros((1, 1))
    y = np.array([[0.5]])
    # 2 * Phi(0.5)^1.5 = 2 * 0.5^{1.2}
    assert scalar(F, x, y) == pytest.approx(2.0 * 0.5 ** 1.2, rel=1e-12)
    far = np.array([[10.0]])
    assert scalar(F, x, far) == pytest.approx(2.0)  # capped at C


def test_fuchsian_properties(stable04):
    F = make_fuchsian(stable04, 1.5, 1.0)
    x = np.array([[3.0]])
    assert scalar(F, x, x) == 0.0
    y = np.array([[3.5]])
    assert 0 < scalar(F, x, y) <= 1.0
    # symmetric
    assert scalar(F, x, y) == pytest.approx(scalar(F, y, x), rel=1e-12)
    with pytest.raises(ValueError):
        make_fuchsian(stable04, 0.9, 1.0)


def test_class_membership(stable04):
    F = make_fuchsian(stable04, 1.5, 1.0)
    ftilde = lambda r: np.minimum(np.asarray(phi_cap(stable04, r)) ** 1.5, 1.0)
    # the envelope constant for this form is 4^beta times the prefactor
    rep = class_check(F, 4.0 ** 1.5, ftilde, sample_size=20_000, seed=4, d=1)
    assert rep["member"]
    assert rep["violations"] == 0
    assert np.isfinite(rep["small_time_rate"])


def test_counterexample_geometry(stable04):
    ce, F = make_counterexample(stable04, 1, 0.25, 1.5, 6)
    for n, (c, r) in enumerate(zip(ce.centers_norm, ce.radii), start=1):
        assert c > 2.0 ** n
        assert r < c
        # Phi(|x_n|)^{1-gamma} = 2^{n d}
        assert phi_cap(stable04, c) ** 0.75 == pytest.approx(2.0 ** n, rel=1e-9)
    x = ce.centers()[2:3]
    assert scalar(F, x, x) == 0.0
    y = x + 0.5
    assert 0 < scalar(F, x, y) <= 1.0
    outside = np.zeros((1, 1))
    assert scalar(F, outside, outside + 0.5) == 0.0


def test_counterexample_invariant_enforced():
    with pytest.raises(ValueError):
        CounterexampleSpec(0.25, 1.5, 1, 1, (1.5,), (0.5,))


def test_accumulate_matches_manual(stable04):
    F = truncated_profile_functional(stable04, 1.5, 1.0)
    path = sample_sbm_path(stable04, 1, horizon=0.5, cutoff=1e-4,
                           grid_step=0.05, seed=15)
    times, running = accumulate(path, F)
    manual = sum(scalar(F, e.pre[None], e.post[None]) for e in path.jumps)
    assert running[-1] == pytest.approx(manual, rel=1e-12)
    assert np.all(np.diff(running) >= 0)


def test_expected_functional_against_quadrature(stable04):
    F = truncated_profile_functional(stable04, 1.5, 1.0)
    rep = expected_functional_mc(stable04, 1, F, None, t=0.1, N=20_000,
                                 cutoff=1e-10, seed=8)
    assert rep.reference is not None
    assert abs(rep.estimate - rep.reference) <= 3 * rep.se
    assert rep.details["bias_fraction"] < 0.01


def test_rate_table_matches_direct(stable04):
    F = make_fuchsian(stable04, 1.5, 0.5)
    table = radial_rate_table(stable04, 1, F, truncation=1e-6)
    direct = levy_system_rate(stable04, 1, F, np.array([2.0]),
                              truncation=1e-6, quad_rtol=1e-2)
    assert float(table(2.0)) == pytest.approx(direct, rel=0.05)


def test_gauge_estimate_bounds(stable04):
    F = make_fuchsian(stable04, 1.5, 0.25)
    rep = gauge_estimate(stable04, 1, F, np.array([2.0]), T_trunc=5.0,
                         N=2000, seed=6, cutoff=1e-4)
    assert 0 < rep.estimate <= 1.0
    assert rep.se > 0


def test_gh_partial_sums_divergence(stable04):
    ce, _ = make_counterexample(stable04, 1, 0.25, 1.5, 6)
    res = gh_partial_sums(ce, stable04, 1, 6)
    assert res["verdict"] == "DIVERGENT"
    assert res["slope"] > 0
    assert res["r_squared"] > 0.99


def test_hitting_probe_shape(stable04):
    ce, _ = make_counterexample(stable04, 1, 0.25, 1.5, 5)
    res = counterexample_hitting_probe(ce, stable04, 1, N=400, seed=12,
                                       dt=0.5, horizon=200.0)
    assert res["hit_fraction"].shape == (5,)
    assert np.all(res["hit_fraction"] <= 1.0)
    assert res["c_calibrated"] > 0
