import numpy as np
import pytest

from sbmlab.functionals import make_fuchsian, radial_rate_table
from sbmlab.girsanov import (
    class_i2_check,
    doleans_weight,
    effective_sample_size,
    entropy_estimate,
    entropy_fuchsian,
    f2_expectation,
    f2_horizon_sweep,
    make_entropy_counterexample,
    martingale_check,
)
from sbmlab.sampler import sample_sbm_path


def scalar(F, x, y):
    return float(np.asarray(F(x, y)).ravel()[0])


def test_entropy_fuchsian_shape(stable04):
    F = entropy_fuchsian(stable04, 0.8, 0.2, range_cut=1.0)
    x = np.array([[0.0]])
    near = np.array([[0.5]])
    far = np.array([[3.0]])
    assert 0 < scalar(F, x, near) <= 0.2
    assert scalar(F, x, far) == 0.0  # outside the jump-size cut
    assert scalar(F, x, x) == 0.0
    with pytest.raises(ValueError):
        entropy_fuchsian(stable04, 0.4, 0.2)
    with pytest.raises(ValueError):
        entropy_fuchsian(stable04, 0.8, -1.0)


def test_effective_sample_size():
    assert effective_sample_size(np.ones(50)) == pytest.approx(50.0)
    w = np.zeros(50)
    w[0] = 1.0
    assert effective_sample_size(w) == pytest.approx(1.0)


def test_doleans_weight_trajectory(stable04):
    F = make_fuchsian(stable04, 1.5, 0.5)
    path = sample_sbm_path(stable04, 1, horizon=0.5, cutoff=1e-3,
                           grid_step=0.05, seed=19)
    table = radial_rate_table(stable04, 1, F, truncation=1e-3)
    traj = doleans_weight(path, F, rate_table=table)
    assert traj.weight[0] == pytest.approx(1.0)
    assert np.all(traj.weight > 0)
    assert np.all(np.diff(traj.compensator_integral) >= 0)
    # log L = log-product - compensator, enforced by the container too
    resid = np.log(traj.weight) - (traj.log_product - traj.compensator_integral)
    assert np.max(np.abs(resid)) < 1e-10


def test_martingale_mean_one(stable04):
    F = make_fuchsian(stable04, 1.5, 0.5)
    rep = martingale_check(stable04, 1, F, None, t=0.1, N=20_000,
                           cutoff=1e-8, seed=23)
    assert rep.verdict == "PASS"
    assert abs(rep.estimate - 1.0) <= 3 * rep.se


def test_entropy_nonnegative(stable04):
    F = make_fuchsian(stable04, 1.5, 0.5)
    rep = entropy_estimate(stable04, 1, F, None, t=0.1, N=20_000, seed=29,
                           cutoff=1e-8)
    assert rep.estimate >= -3 * rep.se
    assert 0 < rep.details["ess"] <= rep.n


def test_f2_identity_paired(stable04):
    F = make_fuchsian(stable04, 1.5, 0.5)
    rep = f2_expectation(stable04, 1, F, None, t=0.1, N=20_000, seed=37,
                         cutoff=1e-8)
    assert rep.verdict == "PASS"
    assert abs(rep.details["paired_diff"]) <= 3 * max(rep.details["se_diff"], 1e-15)


def test_entropy_counterexample_envelope(stable04):
    F = make_entropy_counterexample(stable04, 1, 0.2, 0.8, 6)
    assert F.bound == pytest.approx(0.125)
    ce = F.counterexample_geometry
    x = ce.centers()[1:2]
    assert scalar(F, x, x) == 0.0
    y = x + 0.4
    val = scalar(F, x, y)
    assert 0 <= val <= 0.125
    with pytest.raises(ValueError):
        make_entropy_counterexample(stable04, 1, 0.6, 0.8, 4)


def test_entropy_counterexample_is_sqrt_h_over_8(stable04):
    from sbmlab.functionals import make_counterexample

    F = make_entropy_counterexample(stable04, 1, 0.2, 0.8, 6)
    _, H = make_counterexample(stable04, 1, 0.4, 1.6, 6)
    ce = F.counterexample_geometry
    rng = np.random.default_rng(1)
    x = ce.centers()[3:4] + rng.uniform(-0.3, 0.3, (50, 1))
    y = ce.centers()[3:4] + rng.uniform(-0.3, 0.3, (50, 1))
    assert np.allclose(np.asarray(F(x, y)) ** 2,
                       np.asarray(H(x, y)) / 64.0, rtol=1e-12)


def test_horizon_sweep_shapes(stable04):
    F = entropy_fuchsian(stable04, 0.8, 0.2)
    res = f2_horizon_sweep(stable04, 1, F, None, [1.0, 2.0, 4.0], N=1000,
                           seed=41, cutoff=1e-3)
    assert res["estimates"].shape == (3,)
    # pathwise-nested horizons give nondecreasing means
    assert np.all(np.diff(res["estimates"]) >= 0)
    assert res["verdict"] in ("FINITE", "DIVERGENT", "INCONCLUSIVE")


def test_class_i2_report(stable04):
    F = make_fuchsian(stable04, 1.5, 1.0)
    rep = class_i2_check(F, stable04, 1, t=0.1)
    assert rep["j_class"] == "PASS"
    assert np.isfinite(rep["envelope_rate"])
    Fce = make_entropy_counterexample(stable04, 1, 0.2, 0.8, 6)
    rep2 = class_i2_check(Fce, stable04, 1, t=0.1)
    assert rep2["i2_global"] == "DIVERGENT"
    assert rep2["i2_local_rate_finite"]
