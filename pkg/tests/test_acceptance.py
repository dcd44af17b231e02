"""End-to-end verification gate.

Each test pins one headline property of the toolkit at full Monte Carlo
scale: quadrature oracles, scaling laws, inequality calibrations, the
martingale and square-sum identities, and the divergent constructions.
"""

import numpy as np
import pytest

from sbmlab.bernstein import mixture_spec, phi_cap, stable_spec
from sbmlab.functionals import (
    counterexample_hitting_probe,
    expected_functional_mc,
    gh_partial_sums,
    harnack_probe,
    make_counterexample,
    make_fuchsian,
    truncated_profile_functional,
)
from sbmlab.girsanov import (
    entropy_fuchsian,
    f2_expectation,
    f2_horizon_sweep,
    make_entropy_counterexample,
    martingale_check,
)
from sbmlab.green import (
    BallGeometry,
    _sample_interior,
    key_integral_sweep,
    three_g_calibrate,
    three_g_check,
)
from sbmlab.levy_kernel import check_j_bounds, jump_density
from sbmlab.sampler import (
    annulus_hitting_probe,
    choose_M,
    exit_overshoot_probe,
    scaling_identity_ks,
)

SEED = 20240817


@pytest.fixture(scope="module")
def spec04():
    return stable_spec(0.4)


@pytest.fixture(scope="module")
def overshoot_reports(spec04):
    return {s: exit_overshoot_probe(spec04, 1, s, 4.0 * s, 100_000,
                                    SEED + i)
            for i, s in enumerate((0.25, 1.0, 4.0))}


def test_jump_density_oracle():
    """Quadrature j(r) agrees with the closed form to 1e-6."""
    radii = np.geomspace(1e-3, 1e3, 50)
    for d, alpha in ((1, 0.4), (3, 0.75)):
        spec = stable_spec(alpha)
        jq = np.asarray(jump_density(spec, d, radii, use_closed_form=False))
        jc = np.asarray(jump_density(spec, d, radii, use_closed_form=True))
        rel = np.abs(jq / jc - 1.0)
        assert rel.max() < 1e-6, f"(d={d}, alpha={alpha}): {rel.max():.2e}"


def test_jump_density_bound_shape(spec04):
    """j(r) r^d Phi(r) is constant for the pure power and a narrow band
    for the mixture."""
    grid = np.geomspace(1e-4, 1.0, 60)
    rep = check_j_bounds(spec04, 1, grid)
    assert rep.details["band"] - 1.0 < 1e-9
    mix = mixture_spec([(0.5, 0.3), (0.5, 0.7)], a1=0.5, a2=1.0,
                       delta1=0.3, delta2=0.7)
    rep = check_j_bounds(mix, 1, grid)
    assert rep.details["band"] < 10.0


def test_levy_system_identity(spec04):
    """MC mean of the jump functional matches the quadrature rate."""
    F = truncated_profile_functional(spec04, 1.5, 1.0)
    rep = expected_functional_mc(spec04, 1, F, None, t=0.1, N=100_000,
                                 cutoff=1e-10, seed=SEED)
    assert rep.reference is not None
    assert abs(rep.estimate - rep.reference) <= 3 * rep.se
    assert rep.details["bias_budget"] < 0.01 * rep.estimate


def test_key_integral_scaling(spec04):
    """Sup of the double integral scales like r^{1.2} over small balls."""
    F = truncated_profile_functional(spec04, 1.5, 1.0)
    radii = [2.0 ** -k for k in range(2, 9)]
    res = key_integral_sweep(spec04, 1, radii, lambda r: F)
    assert abs(res["slope_fit"] - 1.2) <= 0.12
    assert np.all(np.diff(np.asarray(res["sup_integral"])[np.argsort(radii)]) > 0)


def test_three_g_inequality(spec04):
    """Constant calibrated on one seed validates on a disjoint seed."""
    geom = BallGeometry(np.zeros(1), 1.0)
    n = 100_000
    cal = three_g_calibrate(spec04, 1, geom, n, seed=SEED)
    c4 = cal["C4_empirical"] * 1.05
    rng = np.random.default_rng(np.random.SeedSequence(entropy=SEED + 10_000))
    pts = _sample_interior(rng, 4 * n, 1, geom.radius)
    res = three_g_check(spec04, 1, geom, pts[:n], pts[n:2 * n],
                        pts[2 * n:3 * n], pts[3 * n:], c4=c4)
    assert float(np.mean(res["passed"])) == 1.0


def test_exit_overshoot_constant(overshoot_reports):
    """The empirical constant in the overshoot bound is scale-stable."""
    cs = np.array([rep.details["c_empirical"]
                   for rep in overshoot_reports.values()])
    assert np.all(np.abs(cs / cs.mean() - 1.0) <= 0.25), cs
    for rep in overshoot_reports.values():
        assert rep.details["censored_fraction"] <= 0.05


def test_annulus_floor(spec04, overshoot_reports):
    """Exits land in the M-annulus with probability at least one half."""
    c_emp = overshoot_reports[1.0].details["c_empirical"]
    M = choose_M(1, 0.4, 1.0, c_emp)
    radii = [2.0 ** n for n in range(1, 7)]
    res = annulus_hitting_probe(spec04, 1, M, radii, 20_000, SEED)
    assert res["verdict"] == "PASS"
    for rec in res["per_exit"]:
        assert rec["p_land"] >= 0.5 - 3 * rec["se"], rec


def test_harnack_uniformity(spec04):
    """Gauge spread over scaled probe points stays flat in the scale."""
    F = make_fuchsian(spec04, 1.5, 0.5)
    pts = np.array([[2.25], [-2.25], [3.0], [-3.0], [3.75], [-3.75]])
    res = harnack_probe(spec04, 1, F, [1.0, 4.0, 16.0], pts, 10_000, SEED)
    assert res["verdict"] == "PASS", res
    assert res["slope"] <= 0.1


def test_counterexample_divergence(spec04):
    """The ball-system potential grows linearly and the balls are hit at
    the predicted geometric rate."""
    ce, _ = make_counterexample(spec04, 1, 0.25, 1.5, 8)
    sums = gh_partial_sums(ce, spec04, 1, 8)
    assert sums["verdict"] == "DIVERGENT"
    assert sums["slope"] > 0
    assert sums["r_squared"] > 0.99
    hits = counterexample_hitting_probe(ce, spec04, 1, N=1000, seed=SEED,
                                        dt=0.5, horizon=2000.0)
    freq = hits["hit_fraction"]
    # decay consistent with 2^{(1-n)(d - 2 delta2)} up to a constant
    assert hits["c_calibrated"] < 5.0
    positive = freq > 0
    ratios = freq[positive] / hits["bound_shape"][positive]
    assert ratios.max() / max(ratios.min(), 1e-12) < 25.0
    se = hits["se"]
    assert np.all(np.diff(freq) <= 3 * (se[1:] + se[:-1]))


def test_doleans_martingale_and_f2_identity(spec04):
    """E[L_t] = 1 and both sides of the square-sum identity agree."""
    F = make_fuchsian(spec04, 1.5, 0.5)
    rep = martingale_check(spec04, 1, F, None, t=0.1, N=100_000,
                           cutoff=1e-8, seed=SEED)
    assert abs(rep.estimate - 1.0) <= 3 * rep.se, (rep.estimate, rep.se)
    rep2 = f2_expectation(spec04, 1, F, None, t=0.1, N=100_000, seed=SEED + 1,
                          cutoff=1e-8)
    assert rep2.verdict == "PASS"
    assert abs(rep2.details["paired_diff"]) <= \
        3 * max(rep2.details["se_diff"], 1e-15)


def test_entropy_dichotomy(spec04):
    """Square sums stabilize for the truncated construction with beta
    above one half and keep growing for the ball counterexample."""
    # stabilizing side: strongly transient regime so the long-horizon
    # tail of E[F^2 composed with the path] is summable fast enough to
    # resolve within the estimates' standard errors
    spec75 = stable_spec(0.75)
    F_ok = entropy_fuchsian(spec75, 0.8, 0.5)
    ok = f2_horizon_sweep(spec75, 3, F_ok, None,
                          [16.0, 32.0, 64.0, 128.0, 256.0], N=4000,
                          seed=SEED, cutoff=1e-3, chunk=128)
    assert ok["verdict"] == "FINITE", ok

    F_bad = make_entropy_counterexample(spec04, 1, 0.2, 0.8, 8)
    bad = f2_horizon_sweep(spec04, 1, F_bad, None,
                           [2.0, 4.0, 8.0, 16.0, 32.0], N=4000,
                           seed=SEED + 1, cutoff=1e-4)
    assert bad["verdict"] == "DIVERGENT", bad
    assert np.all(np.diff(bad["estimates"]) > 0)
    assert np.all(bad["doubling_diffs"] > bad["band"])


def test_scaling_law_marginals(spec04):
    """Rescaled marginals match the rescaled process at KS level 1e-3."""
    for i, R in enumerate((2.0, 8.0)):
        rep = scaling_identity_ks(spec04, 1, t=0.5, R=R, N=100_000,
                                  seed=SEED + i)
        assert rep.verdict == "PASS"
        assert rep.estimate < rep.reference
