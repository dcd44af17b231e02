"""Subordinator Levy density, jump density of X, Levy-system rates, Kato integral.

The jump density of the subordinate Brownian motion is the subordination
integral

    j(r) = int_0^inf (4 pi t)^(-d/2) exp(-r^2 / 4t) mu(t) dt,

evaluated on a log grid; for the stable family the closed form
A(d, 2 alpha) r^(-d - 2 alpha) is available as a fast path and oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn
from scipy.special import roots_legendre

from .bernstein import BernsteinSpec, phi_cap
from .reports import EstimateReport, PASS, FINITE, DIVERGENT

__all__ = [
    "levy_measure_density",
    "levy_tail_mass",
    "small_jump_drift",
    "stable_jump_constant",
    "jump_density",
    "jump_density_table",
    "JumpDensityTable",
    "check_j_bounds",
    "levy_system_rate",
    "kato_integral",
    "small_jump_bias_rate",
]


def _stable_mu_coef(alpha: float) -> float:
    return alpha / gamma_fn(1.0 - alpha)


def levy_measure_density(spec: BernsteinSpec, t) -> np.ndarray | float:
    """Levy density mu(t) of the subordinator, t > 0."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise ValueError("mu(t) requires t > 0")
    if spec.family == "stable":
        out = _stable_mu_coef(spec.alpha) * t_arr ** (-1.0 - spec.alpha)
    elif spec.family == "mixture":
        out = sum(w * _stable_mu_coef(a) * t_arr ** (-1.0 - a)
                  for w, a in spec.mixture_terms)
    else:
        out = spec.mu_raw(t_arr) / spec.mu_norm
    return out if np.ndim(t) else float(out)


def levy_tail_mass(spec: BernsteinSpec, eps: float) -> float:
    """Total jump rate above the cutoff: int_eps^inf mu(t) dt."""
    if eps <= 0:
        raise ValueError("cutoff must be positive")
    if spec.family == "stable":
        return eps ** -spec.alpha / gamma_fn(1.0 - spec.alpha)
    if spec.family == "mixture":
        return sum(w * eps ** -a / gamma_fn(1.0 - a) for w, a in spec.mixture_terms)
    val, _ = integrate.quad(
        lambda u: levy_measure_density(spec, np.exp(u)) * np.exp(u),
        np.log(eps), np.log(eps) + 200.0, epsabs=0.0, epsrel=1e-10, limit=400)
    return val


def small_jump_drift(spec: BernsteinSpec, eps: float) -> float:
    """Mean drift replacing discarded jumps: int_0^eps t mu(t) dt."""
    if eps <= 0:
        raise ValueError("cutoff must be positive")
    if spec.family == "stable":
        a = spec.alpha
        return a / ((1.0 - a) * gamma_fn(1.0 - a)) * eps ** (1.0 - a)
    if spec.family == "mixture":
        return sum(w * a / ((1.0 - a) * gamma_fn(1.0 - a)) * eps ** (1.0 - a)
                   for w, a in spec.mixture_terms)
    val, _ = integrate.quad(
        lambda u: np.exp(2 * u) * levy_measure_density(spec, np.exp(u)),
        np.log(eps) - 200.0, np.log(eps), epsabs=0.0, epsrel=1e-10, limit=400)
    return val


def stable_jump_constant(d: int, alpha: float) -> float:
    """A(d, 2 alpha) in j(r) = A r^(-d - 2 alpha) for the stable family."""
    return (alpha * 4.0 ** alpha * gamma_fn(d / 2.0 + alpha)
            / (np.pi ** (d / 2.0) * gamma_fn(1.0 - alpha)))


def _jump_density_quad(spec: BernsteinSpec, d: int, r: float,
                       lower: float = 0.0, epsrel: float = 1e-10) -> float:
    peak = max(r * r / (2.0 * d + 4.0), 1e-300)

    def f(u):
        t = np.exp(u)
        return (4.0 * np.pi * t) ** (-d / 2.0) * np.exp(-r * r / (4.0 * t)) \
            * levy_measure_density(spec, t) * t

    lo = np.log(peak) - 45.0
    hi = np.log(peak) + 120.0 / (d / 2.0 + spec.delta1)
    if lower > 0.0:
        lo = max(lo, np.log(lower))
        if lo >= hi:
            return 0.0
    val, err = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=epsrel, limit=400)
    if val > 0 and err > 1e-6 * val:
        raise ArithmeticError(
            f"jump density quadrature did not converge at r={r}: error {err:.3e}")
    return val


def jump_density(spec: BernsteinSpec, d: int, r, use_closed_form: bool | None = None,
                 lower: float = 0.0):
    """Jump density j(r) of X, r > 0.

    For the stable family the closed form is used unless `use_closed_form`
    is False.  `lower` truncates the subordination integral below
    (small-jump-removed density used by the Girsanov compensator).
    """
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr <= 0):
        raise ValueError("j(r) requires r > 0")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    closed = spec.family == "stable" if use_closed_form is None else use_closed_form
    if closed and spec.family == "stable" and lower == 0.0:
        out = stable_jump_constant(d, spec.alpha) * r_arr ** (-d - 2.0 * spec.alpha)
    else:
        out = np.array([_jump_density_quad(spec, d, float(rv), lower=lower)
                        for rv in r_arr])
    return out if np.ndim(r) else float(out[0])


@dataclass
class JumpDensityTable:
    """Tabulated j on an increasing radius grid (immutable after build)."""

    spec: BernsteinSpec
    d: int
    radii: np.ndarray
    values: np.ndarray
    closed_form_flag: bool
    lower: float = 0.0

    def __post_init__(self):
        if np.any(np.diff(self.radii) <= 0):
            raise ValueError("radii must be strictly increasing")
        if np.any(self.values <= 0) or not np.all(np.isfinite(self.values)):
            raise ValueError("j values must be positive and finite")
        if np.any(np.diff(self.values) > 0):
            raise ValueError("j must be nonincreasing in r")

    def interpolate(self, r) -> np.ndarray:
        """Log-log linear interpolation; below the grid the value is
        clamped (truncated densities flatten there), above it the last
        decade's power law is extended."""
        logr = np.log(np.asarray(r, dtype=float))
        lr = np.log(self.radii)
        lv = np.log(self.values)
        out = np.interp(logr, lr, lv)
        high = logr > lr[-1]
        if np.any(high):
            slope = (lv[-1] - lv[-2]) / (lr[-1] - lr[-2])
            out = np.where(high, lv[-1] + slope * (logr - lr[-1]), out)
        return np.exp(out)

    def rows(self):
        flag = int(self.closed_form_flag)
        for r, v in zip(self.radii, self.values):
            yield (float(r), float(v), flag)


def jump_density_table(spec: BernsteinSpec, d: int, radii,
                       lower: float = 0.0) -> JumpDensityTable:
    radii = np.asarray(radii, dtype=float)
    closed = spec.family == "stable" and lower == 0.0
    values = np.asarray(jump_density(spec, d, radii, lower=lower))
    # iron out quadrature noise on the flat part of truncated densities
    values = np.minimum.accumulate(values)
    return JumpDensityTable(spec, d, radii, values, closed, lower=lower)


def check_j_bounds(spec: BernsteinSpec, d: int, grid) -> EstimateReport:
    """Empirical sandwich constant for j(r) ~ r^-d Phi(r)^-1 on (0, 1].

    Reports the min/max of j(r) r^d Phi(r) over the grid; the empirical C1
    is max(hi, 1/lo).  The verdict is PASS whenever the band is finite.
    """
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0) or np.any(grid > 1):
        raise ValueError("grid radii must lie in (0, 1]")
    j = np.asarray(jump_density(spec, d, grid))
    ratio = j * grid ** d * np.asarray(phi_cap(spec, grid))
    lo, hi = float(ratio.min()), float(ratio.max())
    finite = np.all(np.isfinite(ratio)) and lo > 0
    c1 = max(hi, 1.0 / lo) if finite else float("inf")
    return EstimateReport(
        name="j-bound-shape",
        estimate=c1,
        verdict=PASS if finite else "FAIL",
        details={"ratio_min": lo, "ratio_max": hi, "band": hi / lo if finite else float("inf"),
                 "radii": grid, "ratios": ratio},
    )


# -- Levy-system rate h(y) = int F(y, z) j(|y-z|) dz ---------------------------


def _sphere_rule(d: int, n_polar: int):
    """Quadrature nodes/weights for the unit sphere, averaged (weights sum to 1)."""
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([0.5, 0.5])
    if d == 2:
        theta = (np.arange(n_polar) + 0.5) * (2 * np.pi / n_polar)
        pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        return pts, np.full(n_polar, 1.0 / n_polar)
    # d >= 3: Gauss-Legendre in cos(polar angle) x uniform azimuth, applied to
    # the first two coordinates against a uniform product on the rest is only
    # exact for d == 3; higher d is out of range for this toolkit.
    if d != 3:
        raise NotImplementedError("sphere rule implemented for d <= 3")
    c, wc = roots_legendre(n_polar)
    phi = (np.arange(2 * n_polar) + 0.5) * (np.pi / n_polar)
    cc, pp = np.meshgrid(c, phi, indexing="ij")
    s = np.sqrt(1 - cc ** 2)
    pts = np.stack([s * np.cos(pp), s * np.sin(pp), cc], axis=-1).reshape(-1, 3)
    w = np.broadcast_to(wc[:, None] / 2.0 / (2 * n_polar), cc.shape).reshape(-1)
    return pts, w


def _radial_log_nodes(lo: float, hi: float, n: int):
    x, w = roots_legendre(n)
    u = 0.5 * (x + 1.0) * (np.log(hi) - np.log(lo)) + np.log(lo)
    wu = 0.5 * (np.log(hi) - np.log(lo)) * w
    rho = np.exp(u)
    return rho, wu * rho  # weights include the d rho = rho d(log rho) Jacobian


def levy_system_rate(spec: BernsteinSpec, d: int, F, y,
                     j_table: JumpDensityTable | None = None,
                     truncation: float = 0.0,
                     rho_min: float = 1e-12, rho_max: float = 1e6,
                     n_radial: int = 768, n_polar: int = 32,
                     quad_rtol: float = 1e-4) -> float:
    """h(y) = int F(y, z) j(|y - z|) dz by polar-coordinate quadrature.

    `F` is a symmetric functional evaluated pairwise as F(y, z) with z an
    (n, d) array (d == 1 accepts flat arrays).  `truncation` removes the
    subordinator jumps below that level from j (matching a compound
    Poisson sampler with that cutoff).  Convergence is checked by doubling
    the radial order.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    omega, w_ang = _sphere_rule(d, n_polar)

    def eval_rate(n_rad: int) -> float:
        rho, w_rad = _radial_log_nodes(rho_min, rho_max, n_rad)
        if j_table is not None:
            # caller guarantees the table's truncation level matches
            j = j_table.interpolate(rho)
        else:
            j = np.asarray(jump_density(spec, d, rho, lower=truncation))
        surf = _sphere_area(d)
        # angular average of F at each radius
        z = y[None, None, :] + rho[:, None, None] * omega[None, :, :]
        fvals = F(np.broadcast_to(y, z.shape), z)
        ang = (fvals * w_ang[None, :]).sum(axis=1)
        return float(np.sum(w_rad * rho ** (d - 1) * j * ang) * surf)

    val = eval_rate(n_radial)
    ref = eval_rate(2 * n_radial)
    # profiles saturating at 1 have a kink, which limits the radial rule to
    # roughly 1e-5 relative accuracy at these orders
    if abs(val - ref) > quad_rtol * max(abs(ref), 1e-12):
        raise ArithmeticError(
            f"Levy-system rate quadrature not converged: {val} vs {ref}")
    return ref


def _sphere_area(d: int) -> float:
    return 2.0 * np.pi ** (d / 2.0) / gamma_fn(d / 2.0)


def kato_integral(spec: BernsteinSpec, ftilde, n: int = 4096) -> tuple[float, str]:
    """int_0^1 Ftilde(s) / (Phi(s) s) ds with a divergence verdict.

    The verdict is decided by fitting the local exponent of the integrand
    on (1e-8, 1e-4): exponent <= -1 means the integral diverges at 0.
    """
    sample = np.asarray(ftilde(np.array([1e-6, 0.1, 0.5, 1.0])))
    if np.any(sample < -1e-12) or np.any(sample > 1 + 1e-12):
        raise ValueError("radial profile must take values in [0, 1]")

    s_fit = np.geomspace(1e-8, 1e-4, 9)
    g_fit = np.asarray(ftilde(s_fit)) / (np.asarray(phi_cap(spec, s_fit)) * s_fit)
    if np.all(g_fit == 0):
        return 0.0, FINITE
    pos = g_fit > 0
    slope = np.polyfit(np.log(s_fit[pos]), np.log(g_fit[pos]), 1)[0]
    verdict = FINITE if slope > -1.0 else DIVERGENT

    s, w = _radial_log_nodes(1e-12, 1.0, n)
    g = np.asarray(ftilde(s)) / (np.asarray(phi_cap(spec, s)) * s)
    value = float(np.sum(w * g))
    return value, verdict


def small_jump_bias_rate(spec: BernsteinSpec, d: int, ftilde, C: float,
                         cutoff: float, n_quad: int = 200) -> float:
    """Per-unit-time expected contribution of discarded subordinator jumps.

    For F in I(C, Ftilde) a jump of subordinator size v displaces X by a
    centered Gaussian with per-coordinate variance 2v, so the discarded
    rate is bounded by C int_0^cutoff E[Ftilde(|Z_v|)] mu(dv).
    """
    if cutoff <= 0:
        return 0.0
    v, wv = _radial_log_nodes(cutoff * 1e-12, cutoff, n_quad)
    # E over the d-dim Gaussian via radial chi distribution sampling nodes
    q, wq = roots_legendre(64)
    u = 0.5 * (q + 1.0)  # quantile nodes in (0,1)
    from scipy.stats import chi
    radii = chi.ppf(u, df=d)
    wq = 0.5 * wq
    scale = np.sqrt(2.0 * v)
    vals = np.asarray(ftilde(np.clip(scale[:, None] * radii[None, :], 1e-300, None)))
    expectation = (vals * wq[None, :]).sum(axis=1)
    mu = np.asarray(levy_measure_density(spec, v))
    return float(C * np.sum(wv * mu * expectation))
