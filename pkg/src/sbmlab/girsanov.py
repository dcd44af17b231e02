"""Doleans-Dade weights along sampled paths, martingale and reweighting
checks, relative-entropy estimators, and the square-summability probes.

The weight of the purely discontinuous change of measure is

    L_t = exp(-int_0^t h(X_s) ds) * prod_{s <= t} (1 + F(X_{s-}, X_s)),

with h(y) = int F(y, z) j(|y - z|) dz.  Simulated paths carry the
truncated jump kernel (subordinator jumps above the cutoff), so the
compensator uses the matching truncated rate; with that pairing the
weight is an exact martingale for the simulated process and E[L_t] = 1
is a sharp test rather than an approximation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bernstein import BernsteinSpec, phi_cap
from .functionals import (
    FunctionalSpec,
    RateTable,
    _batch_jump_positions,
    _phi_of_norm,
    _vnorm,
    make_counterexample,
    radial_rate_table,
)
from .levy_kernel import levy_system_rate
from .reports import EstimateReport, PASS, FAIL, INCONCLUSIVE, DIVERGENT, FINITE
from .sampler import rng_for

__all__ = [
    "WeightTrajectory",
    "doleans_weight",
    "martingale_check",
    "entropy_estimate",
    "f2_expectation",
    "f2_horizon_sweep",
    "entropy_fuchsian",
    "make_entropy_counterexample",
    "class_i2_check",
    "effective_sample_size",
]


def entropy_fuchsian(spec: BernsteinSpec, beta: float, C: float,
                     range_cut: float = 1.0) -> FunctionalSpec:
    """Range-truncated member of the Fuchsian class for beta > 1/2:

        F(x, y) = C Phi(|x-y|)^beta 1{|x-y| <= range_cut}
                  / (1 + Phi(|x|)^beta + Phi(|y|)^beta).

    The truncation removes the far-field plateau of the saturated
    construction, so sums of F^2 have finite expectation and the horizon
    sweep genuinely stabilizes.
    """
    if beta <= 0.5:
        raise ValueError("square-summability requires beta > 1/2")
    if C <= 0 or range_cut <= 0:
        raise ValueError("C and range_cut must be positive")

    def fn(x, y):
        rho = _vnorm(x - y)
        num = _phi_of_norm(spec, rho) ** beta
        den = 1.0 + _phi_of_norm(spec, _vnorm(x)) ** beta \
            + _phi_of_norm(spec, _vnorm(y)) ** beta
        return np.where(rho <= range_cut, C * num / den, 0.0)

    return FunctionalSpec("custom", spec, fn, C=C, beta=beta, bound=C)


def _square(F: FunctionalSpec) -> FunctionalSpec:
    return FunctionalSpec("custom", F.spec,
                          lambda x, y: np.asarray(F(x, y)) ** 2,
                          C=F.C ** 2, beta=None, bound=F.bound ** 2,
                          radial_profile=None if F.radial_profile is None
                          else (lambda r: np.asarray(F.radial_profile(r)) ** 2))


@dataclass
class WeightTrajectory:
    path: object
    times: np.ndarray
    compensator_integral: np.ndarray
    log_product: np.ndarray
    weight: np.ndarray

    def __post_init__(self):
        if np.any(self.weight <= 0):
            raise ValueError("weight must stay positive")
        resid = np.log(self.weight) - (self.log_product - self.compensator_integral)
        if np.max(np.abs(resid)) > 1e-10:
            raise ValueError("weight inconsistent with its factors")


def doleans_weight(path, F: FunctionalSpec, h=None,
                   rate_table: RateTable | None = None) -> WeightTrajectory:
    """Weight trajectory along one recorded path, on the path's grid.

    `h` overrides the compensator rate (callable on positions); by
    default a truncated radial rate table matching the path's cutoff is
    built.  The compensator is trapezoid-integrated on the grid.
    """
    spec = path.spec
    jump_times = np.array([e.time for e in path.jumps])
    if len(jump_times):
        pre = np.stack([e.pre for e in path.jumps])
        post = np.stack([e.post for e in path.jumps])
        fv = np.asarray(F(pre, post))
        if np.any(fv <= -1.0):
            raise ValueError("a jump has F <= -1; weight degenerates")
    else:
        fv = np.zeros(0)
    if h is None:
        if rate_table is None:
            rate_table = radial_rate_table(spec, path.d, F,
                                           truncation=path.cutoff)
        h = lambda pos: rate_table(np.maximum(_vnorm(pos), 1e-12))
    hv = np.asarray(h(path.positions))
    comp = np.concatenate([[0.0], np.cumsum(
        0.5 * (hv[1:] + hv[:-1]) * np.diff(path.grid))])
    logp = np.array([np.sum(np.log1p(fv[jump_times <= t])) for t in path.grid])
    weight = np.exp(logp - comp)
    return WeightTrajectory(path, path.grid, comp, logp, weight)


def _batch_log_weights(spec, d, F, x, t, m, cutoff, rng, h_fn):
    """log L_t and the F^2 jump sums for m paths; exact piecewise-constant
    compensator (positions are constant between jumps up to the tiny
    small-jump drift diffusion)."""
    x = np.zeros(d) if x is None else np.atleast_1d(np.asarray(x, dtype=float))
    data = _batch_jump_positions(spec, d, t, m, cutoff, rng, x0=x)
    ids, times = data["ids"], data["times"]
    fv = np.asarray(F(data["pre"], data["post"]))
    if np.any(fv <= -1.0):
        raise ValueError("a jump has F <= -1; weight degenerates")
    log_prod = np.bincount(ids, weights=np.log1p(fv), minlength=m)
    f2 = np.bincount(ids, weights=fv ** 2, minlength=m)

    # positions in force over each inter-jump segment
    seg_pos = np.empty_like(data["pre"])
    if len(ids):
        seg_pos[1:] = data["post"][:-1]
        counts = data["counts"]
        starts = np.searchsorted(ids, np.arange(m))
        seg_pos[starts[counts > 0]] = x
    prev = np.empty(len(ids))
    if len(ids):
        prev[1:] = times[:-1]
        prev[np.searchsorted(ids, np.arange(m))[data["counts"] > 0]] = 0.0
    seg_dt = times - prev
    comp = np.bincount(ids, weights=np.asarray(h_fn(seg_pos)) * seg_dt,
                       minlength=m)
    # final segment from the last jump to the horizon
    last_pos = np.tile(x, (m, 1)).astype(float)
    counts = data["counts"]
    if len(ids):
        starts = np.searchsorted(ids, np.arange(m))
        last = np.concatenate([starts[1:], [len(ids)]]) - 1
        has = counts > 0
        last_pos[has] = data["post"][last[has]]
    comp += np.asarray(h_fn(last_pos)) * (t - data["t_last"])
    return log_prod - comp, f2, data


def effective_sample_size(weights: np.ndarray) -> float:
    w = np.asarray(weights, dtype=float)
    return float(w.sum() ** 2 / np.sum(w ** 2))


def _default_h(spec, d, F, cutoff, rate_table=None):
    if rate_table is None:
        rate_table = radial_rate_table(spec, d, F, truncation=cutoff)
    return lambda pos: rate_table(np.maximum(_vnorm(pos), 1e-12))


def martingale_check(spec: BernsteinSpec, d: int, F: FunctionalSpec, x,
                     t: float, N: int, cutoff: float, seed: int,
                     rate_table: RateTable | None = None,
                     chunk: int = 8192) -> EstimateReport:
    """Empirical E_x[L_t] against the martingale value 1."""
    rng = rng_for(seed, 41)
    h_fn = _default_h(spec, d, F, cutoff, rate_table)
    w = np.empty(N)
    for s0 in range(0, N, chunk):
        m = min(chunk, N - s0)
        logw, _, _ = _batch_log_weights(spec, d, F, x, t, m, cutoff, rng, h_fn)
        w[s0:s0 + m] = np.exp(logw)
    est = float(w.mean())
    se = float(w.std(ddof=1) / np.sqrt(N))
    verdict = PASS if abs(est - 1.0) <= 3 * se else FAIL
    return EstimateReport(
        name="doleans-martingale",
        estimate=est,
        se=se,
        n=N,
        seed=seed,
        reference=1.0,
        verdict=verdict,
        details={"t": t, "cutoff": cutoff, "ess": effective_sample_size(w),
                 "log_weight_range": [float(np.log(w).min()), float(np.log(w).max())]},
    )


def entropy_estimate(spec: BernsteinSpec, d: int, F: FunctionalSpec, x,
                     t: float, N: int, seed: int, cutoff: float = 1e-6,
                     rate_table: RateTable | None = None,
                     chunk: int = 8192) -> EstimateReport:
    """E_x[L_t log L_t] with the F^2 companion estimate and its quadrature
    reference (radial F only)."""
    rng = rng_for(seed, 43)
    h_fn = _default_h(spec, d, F, cutoff, rate_table)
    w_logw = np.empty(N)
    w = np.empty(N)
    f2 = np.empty(N)
    for s0 in range(0, N, chunk):
        m = min(chunk, N - s0)
        logw, f2_part, _ = _batch_log_weights(spec, d, F, x, t, m, cutoff,
                                              rng, h_fn)
        w[s0:s0 + m] = np.exp(logw)
        w_logw[s0:s0 + m] = np.exp(logw) * logw
        f2[s0:s0 + m] = f2_part
    est = float(w_logw.mean())
    se = float(w_logw.std(ddof=1) / np.sqrt(N))
    f2_est = float(f2.mean())
    f2_se = float(f2.std(ddof=1) / np.sqrt(N))
    f2_quad = None
    if F.radial_profile is not None:
        f2_quad = t * levy_system_rate(spec, d, _square(F), np.zeros(d))
    verdict = INCONCLUSIVE if (est != 0 and se > 0.5 * abs(est)) else PASS
    return EstimateReport(
        name="relative-entropy",
        estimate=est,
        se=se,
        n=N,
        seed=seed,
        verdict=verdict,
        details={"t": t, "cutoff": cutoff, "ess": effective_sample_size(w),
                 "f2_estimate": f2_est, "f2_se": f2_se,
                 "f2_quadrature": f2_quad,
                 "half_f2": 0.5 * f2_est},
    )


def f2_expectation(spec: BernsteinSpec, d: int, F: FunctionalSpec, x,
                   t: float, N: int, seed: int, cutoff: float = 1e-6,
                   rate_table: RateTable | None = None,
                   chunk: int = 8192) -> EstimateReport:
    """Both sides of the square-sum identity on shared paths:

        E_x[sum_{s<=t} F^2] = E_x[int_0^t int F^2(X_s, y) j_trunc dy ds].

    The right side is the compensator of the left under the simulated
    (truncated) kernel, so the paired difference should vanish within
    Monte Carlo error.  Implemented for isotropic F via the radial rate
    table of F^2.
    """
    F2 = _square(F)
    rng = rng_for(seed, 47)
    if rate_table is None:
        rate_table = radial_rate_table(spec, d, F2, truncation=cutoff)
    h_fn = lambda pos: rate_table(np.maximum(_vnorm(pos), 1e-12))
    x = np.zeros(d) if x is None else np.atleast_1d(np.asarray(x, dtype=float))
    jump_side = np.empty(N)
    quad_side = np.empty(N)
    for s0 in range(0, N, chunk):
        m = min(chunk, N - s0)
        # reuse the weight machinery: log-product of F2 is not needed, but the
        # compensator accumulator is exactly the time integral of the rate
        logw, _, data = _batch_log_weights(spec, d, F2, x, t, m, cutoff,
                                           rng, h_fn)
        jump_side[s0:s0 + m] = np.bincount(
            data["ids"], weights=np.asarray(F(data["pre"], data["post"])) ** 2,
            minlength=m)
        # recover the compensator from the identity log L = log_prod - comp
        log_prod = np.bincount(data["ids"],
                               weights=np.log1p(np.asarray(F2(data["pre"], data["post"]))),
                               minlength=m)
        quad_side[s0:s0 + m] = log_prod - logw
    diff = jump_side - quad_side
    est_l, est_r = float(jump_side.mean()), float(quad_side.mean())
    se_l = float(jump_side.std(ddof=1) / np.sqrt(N))
    se_r = float(quad_side.std(ddof=1) / np.sqrt(N))
    se_d = float(diff.std(ddof=1) / np.sqrt(N))
    verdict = PASS if abs(diff.mean()) <= 3 * max(se_d, 1e-15) else FAIL
    return EstimateReport(
        name="square-sum-identity",
        estimate=est_l,
        se=se_l,
        n=N,
        seed=seed,
        reference=est_r,
        verdict=verdict,
        details={"t": t, "cutoff": cutoff, "jump_side": est_l,
                 "quad_side": est_r, "se_jump": se_l, "se_quad": se_r,
                 "paired_diff": float(diff.mean()), "se_diff": se_d},
    )


def f2_horizon_sweep(spec: BernsteinSpec, d: int, F: FunctionalSpec, x,
                     horizons, N: int, seed: int, cutoff: float = 1e-4,
                     chunk: int = 2048) -> dict:
    """E_x[sum_{s<=T} F^2] across nested horizons on shared paths.

    Partial sums are evaluated at every horizon along the longest-horizon
    paths, so successive estimates are pathwise nondecreasing.  The sweep
    reports the doubling differences together with two error scales: the
    paired per-path difference se (a diagnostic; it is tiny because the
    paths are shared) and the estimates' own standard errors, which set
    the resolution at which the estimates are reported.  The verdict
    compares each difference against 3x the larger of the two successive
    estimate standard errors: FINITE when the last difference is inside
    that band, DIVERGENT when every difference exceeds it.
    """
    horizons = np.sort(np.asarray(horizons, dtype=float))
    T = float(horizons[-1])
    rng = rng_for(seed, 53)
    x = np.zeros(d) if x is None else np.atleast_1d(np.asarray(x, dtype=float))
    sums = np.zeros((len(horizons), N))
    for s0 in range(0, N, chunk):
        m = min(chunk, N - s0)
        data = _batch_jump_positions(spec, d, T, m, cutoff, rng, x0=x)
        vals = np.asarray(F(data["pre"], data["post"])) ** 2
        for k, hz in enumerate(horizons):
            keep = data["times"] <= hz
            sums[k, s0:s0 + m] = np.bincount(data["ids"][keep],
                                             weights=vals[keep], minlength=m)
    est = sums.mean(axis=1)
    se = sums.std(axis=1, ddof=1) / np.sqrt(N)
    diffs = np.diff(sums, axis=0)
    d_est = diffs.mean(axis=1)
    d_se = diffs.std(axis=1, ddof=1) / np.sqrt(N)
    band = 3.0 * np.maximum(se[1:], se[:-1])
    grows = bool(np.all(d_est > band))
    stabilizes = bool(d_est[-1] <= band[-1])
    verdict = DIVERGENT if grows else (FINITE if stabilizes else INCONCLUSIVE)
    return {"horizons": horizons, "estimates": est, "se": se,
            "doubling_diffs": d_est, "doubling_diff_se": d_se,
            "band": band, "verdict": verdict, "seed": seed, "N": N,
            "cutoff": cutoff}


def make_entropy_counterexample(spec: BernsteinSpec, d: int, gamma: float,
                                beta: float, N_balls: int) -> FunctionalSpec:
    """F = (1/8) sqrt(H) with H the divergent ball functional built at
    parameters (2 gamma, 2 beta); requires 0 < gamma < 1/2 < beta.

    Sums of F^2 equal (1/64) of the sums of H, so the square-sum horizon
    sweep inherits the divergence of the ball construction while F itself
    stays bounded by 1/8.
    """
    if not 0 < gamma < 0.5 < beta:
        raise ValueError("need 0 < gamma < 1/2 < beta")
    ce, H = make_counterexample(spec, d, 2 * gamma, 2 * beta, N_balls)

    def fn(x, y):
        return 0.125 * np.sqrt(np.asarray(H(x, y)))

    return FunctionalSpec("entropy_counterexample", spec, fn, C=0.125,
                          beta=beta, gamma=gamma, bound=0.125,
                          counterexample_geometry=ce)


def class_i2_check(F: FunctionalSpec, spec: BernsteinSpec, d: int,
                   t: float, ftilde=None) -> dict:
    """Small-time smallness and square-summability rate report.

    The vanishing-small-time class is certified through the envelope rate
    c = int ftilde j; square summability through the F^2 rate at probe
    points.  For ball-supported functionals the report separates the
    locally finite rate from the globally divergent potential.
    """
    if ftilde is None:
        beta = F.beta if F.beta is not None else 1.0
        ftilde = lambda r: np.minimum(_phi_of_norm(spec, r) ** beta, 1.0)
    from .functionals import radial_functional
    env_rate = F.C * levy_system_rate(spec, d, radial_functional(spec, ftilde),
                                      np.zeros(d))
    j_small_time = {tt: env_rate * tt for tt in (t, t / 10.0, t / 100.0)}
    report = {
        "envelope_rate": env_rate,
        "small_time_bound": j_small_time,
        "j_class": PASS if np.isfinite(env_rate) else FAIL,
    }
    ce = F.counterexample_geometry
    if ce is not None:
        from .functionals import gh_partial_sums
        sums = gh_partial_sums(ce, spec, d, ce.N)
        report["i2_local_rate_finite"] = True
        report["i2_global"] = sums["verdict"]
        report["i2_partial_sums"] = sums["partial_sums"]
    else:
        F2 = _square(F)
        probes = [0.0, 1.0, 10.0, 100.0]
        rates = {}
        for r in probes:
            y = np.zeros(d)
            y[0] = r
            rates[r] = levy_system_rate(spec, d, F2, y, quad_rtol=1e-2)
        report["f2_rates"] = rates
        report["i2_global"] = FINITE if all(np.isfinite(v) for v in rates.values()) else DIVERGENT
    return report
