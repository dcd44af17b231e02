import numpy as np
import pytest

from sbmlab.bernstein import (
    BernsteinSpec,
    custom_spec,
    mixture_spec,
    phi_cap,
    phi_cap_inverse,
    phi_eval,
    rescale,
    stable_spec,
    verify_scaling,
)


def grid():
    lams = np.geomspace(1.0, 1e4, 9)
    xs = np.geomspace(1e-5, 1e3, 9)
    return [(float(l), float(x)) for l in lams for x in xs]


def test_stable_phi_is_exact_power(stable04):
    lam = np.geomspace(1e-8, 1e8, 33)
    assert np.allclose(phi_eval(stable04, lam), lam ** 0.4, rtol=1e-14)
    assert phi_eval(stable04, 1.0) == 1.0


def test_stable_scaling_exact(stable04):
    rep = verify_scaling(stable04, grid())
    assert bool(rep)
    assert rep.violations == []
    # the sandwich is an equality for the pure power
    assert abs(rep.worst_slack) < 1e-9


def test_mixture_scaling_sandwich(mixture):
    rep = verify_scaling(mixture, grid())
    assert bool(rep)
    assert rep.worst_slack >= 0.0


def test_mixture_normalized(mixture):
    assert phi_eval(mixture, 1.0) == pytest.approx(1.0, rel=1e-14)


def test_phi_cap_stable(stable04):
    s = np.geomspace(1e-4, 1e4, 17)
    assert np.allclose(phi_cap(stable04, s), s ** 0.8, rtol=1e-13)


def test_phi_cap_monotone(mixture):
    s = np.geomspace(1e-5, 1e5, 200)
    v = np.asarray(phi_cap(mixture, s))
    assert np.all(np.diff(v) > 0)


@pytest.mark.parametrize("value", [1e-6, 0.37, 1.0, 42.0, 1e7])
def test_phi_cap_inverse_roundtrip(mixture, value):
    s = phi_cap_inverse(mixture, value)
    assert phi_cap(mixture, s) == pytest.approx(value, rel=1e-10)


def test_custom_family_matches_stable():
    from scipy.special import gamma
    alpha = 0.6
    mu = lambda t: alpha / gamma(1 - alpha) * t ** (-1 - alpha)
    spec = custom_spec(mu, 1.0, 1.0, alpha, alpha)
    lam = np.array([0.3, 2.0, 50.0])
    assert np.allclose(phi_eval(spec, lam), lam ** alpha, rtol=1e-7)


def test_rescale_stable_invariant(stable04):
    for R in (0.25, 4.0, 64.0):
        rs = rescale(stable04, R)
        lam = np.geomspace(1e-3, 1e3, 7)
        assert np.allclose(phi_eval(rs, lam), phi_eval(stable04, lam), rtol=1e-12)


def test_rescale_normalized(mixture):
    rs = rescale(mixture, 8.0)
    assert phi_eval(rs, 1.0) == pytest.approx(1.0, rel=1e-10)


def test_dim_cap():
    spec = stable_spec(0.75)
    spec.check_dim_cap(2)
    with pytest.raises(ValueError):
        spec.check_dim_cap(1)


def test_serialization_roundtrip(stable04, mixture):
    for spec in (stable04, mixture):
        again = BernsteinSpec.from_dict(spec.to_dict())
        assert again == spec


def test_invalid_specs():
    with pytest.raises(ValueError):
        stable_spec(1.5)
    with pytest.raises(ValueError):
        BernsteinSpec("stable", 1.0, 1.0, 0.7, 0.3, alpha=0.5)
    with pytest.raises(ValueError):
        BernsteinSpec("nope", 1.0, 1.0, 0.3, 0.7)
    with pytest.raises(ValueError):
        mixture_spec([])
