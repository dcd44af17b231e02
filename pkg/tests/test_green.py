import numpy as np
import pytest

from sbmlab.bernstein import stable_spec
from sbmlab.functionals import truncated_profile_functional
from sbmlab.green import (
    BallGeometry,
    ball_green_envelope,
    ball_green_stable,
    free_green_stable,
    key_integral,
    key_integral_sweep,
    poisson_lower_check,
    r0_solve,
    riesz_constant,
    three_g_calibrate,
    three_g_check,
)


def test_ball_geometry():
    geom = BallGeometry(np.zeros(2), 3.0)
    assert geom.contains(np.array([1.0, 1.0]))
    assert not geom.contains(np.array([3.0, 1.0]))
    assert geom.dist_to_boundary(np.zeros(2)) == pytest.approx(3.0)


def test_riesz_constant_known_value():
    # d = 3, beta = 1: Gamma(1) / (2 pi^{3/2} Gamma(1/2)) = 1 / (2 pi^2)
    assert riesz_constant(3, 1.0) == pytest.approx(1.0 / (2.0 * np.pi ** 2),
                                                   rel=1e-12)
    with pytest.raises(ValueError):
        riesz_constant(3, 2.0)


def test_ball_green_symmetry():
    x = np.array([0.3])
    y = np.array([-0.5])
    assert float(ball_green_stable(0.4, 1, 1.0, x, y)) == pytest.approx(
        float(ball_green_stable(0.4, 1, 1.0, y, x)), rel=1e-12)


def test_ball_green_approaches_free_green():
    # center pair in a huge ball: the boundary correction vanishes
    x = np.array([[0.0, 0.0, 0.1]])
    y = np.array([[0.0, 0.0, -0.1]])
    free = free_green_stable(0.75, 3, 0.2)
    for r, tol in ((1e2, 0.05), (1e4, 0.002)):
        gb = float(np.ravel(ball_green_stable(0.75, 3, r, x, y))[0])
        assert gb == pytest.approx(free, rel=tol)
        assert gb < free


def test_ball_green_vanishes_at_boundary():
    x = np.array([[0.999999]])
    y = np.array([[0.0]])
    assert float(np.ravel(ball_green_stable(0.4, 1, 1.0, x, y))[0]) < 1e-2


def test_ball_green_envelope_shape(stable04):
    geom = BallGeometry(np.zeros(1), 1.0)
    a = ball_green_envelope(stable04, 1, geom, np.array([0.1]), np.array([0.4]))
    b = ball_green_envelope(stable04, 1, geom, np.array([0.4]), np.array([0.1]))
    assert a == pytest.approx(b, rel=1e-12)
    assert a > 0
    # deep-interior pair dominates a near-boundary pair at equal separation
    near = ball_green_envelope(stable04, 1, geom, np.array([0.69]),
                               np.array([0.99]))
    assert near < a


def test_three_g_calibration_and_validation(stable04):
    geom = BallGeometry(np.zeros(1), 1.0)
    cal = three_g_calibrate(stable04, 1, geom, 20_000, seed=11)
    c4 = cal["C4_empirical"] * 1.05
    from sbmlab.green import _sample_interior

    rng = np.random.default_rng(np.random.SeedSequence(entropy=99))
    n = 5000
    pts = _sample_interior(rng, 4 * n, 1, 1.0)
    res = three_g_check(stable04, 1, geom, pts[:n], pts[n:2 * n],
                        pts[2 * n:3 * n], pts[3 * n:], c4=c4)
    assert np.all(res["passed"])


def test_key_integral_symmetric_in_endpoints(stable04):
    geom = BallGeometry(np.zeros(1), 0.25)
    F = truncated_profile_functional(stable04, 1.5, 1.0)
    a = key_integral(stable04, 1, geom, F, 0.1, -0.05)
    b = key_integral(stable04, 1, geom, F, -0.05, 0.1)
    assert a == pytest.approx(b, rel=1e-12)
    assert a > 0


def test_key_integral_sweep_monotone(stable04):
    F = truncated_profile_functional(stable04, 1.5, 1.0)
    res = key_integral_sweep(stable04, 1, [2.0 ** -k for k in range(3, 7)],
                             lambda r: F)
    assert np.all(np.diff(res["sup_integral"]) < 0)
    assert res["slope_fit"] > 0


def test_r0_solve_dyadic(stable04):
    res = r0_solve(stable04, 1, 1.5, 1.0, epsilon=0.05)
    assert res["converged"]
    k = -np.log2(res["r0"])
    assert k == pytest.approx(round(k))
    assert res["sup_at_r0"] < 0.05


def test_r0_solve_rejects_bad_args(stable04):
    with pytest.raises(ValueError):
        r0_solve(stable04, 1, 0.9, 1.0, epsilon=0.05)
    with pytest.raises(ValueError):
        r0_solve(stable04, 1, 1.5, 1.0, epsilon=-1.0)


def test_poisson_lower_bound(stable04):
    geom = BallGeometry(np.zeros(1), 1.0)
    rep = poisson_lower_check(stable04, 1, geom,
                              z_grid=np.array([1.5, 2.0, 4.0, 16.0, 128.0]))
    assert rep.verdict == "PASS"
    assert rep.estimate > 0
