"""Green-function machinery: free and ball estimates, 3G, the key double
integral and the r0 solver.

The stable family admits an exact killed-ball Green function (the
classical hypergeometric/incomplete-beta formula), which serves as the
oracle against which the envelope shapes are calibrated.  Non-stable
families fall back on envelope midpoints; all verdicts compare shapes,
never absolute constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, beta as beta_fn, gamma as gamma_fn, roots_legendre

from .bernstein import BernsteinSpec, phi_cap
from .levy_kernel import jump_density, stable_jump_constant
from .reports import EstimateReport, PASS, FAIL

__all__ = [
    "BallGeometry",
    "GreenEnvelope",
    "free_green",
    "riesz_constant",
    "free_green_stable",
    "ball_green_stable",
    "ball_green_envelope",
    "three_g_check",
    "three_g_calibrate",
    "key_integral",
    "key_integral_sweep",
    "r0_solve",
    "poisson_kernel",
    "poisson_lower_check",
]


@dataclass(frozen=True)
class BallGeometry:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, dtype=float)))
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def dist_to_boundary(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        d = self.radius - np.linalg.norm(np.atleast_1d(x) - self.center, axis=-1)
        return d

    def contains(self, x) -> np.ndarray | bool:
        return self.dist_to_boundary(x) > 0


@dataclass(frozen=True)
class GreenEnvelope:
    lower: float
    upper: float
    formula_tag: str

    def __post_init__(self):
        if not (0 <= self.lower <= self.upper):
            raise ValueError("need 0 <= lower <= upper")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)


def riesz_constant(d: int, beta: float) -> float:
    """Constant in the free stable Green function G(r) = c r^(beta - d)."""
    if not 0 < beta < min(2.0, d):
        raise ValueError("need 0 < beta < min(2, d) for transience")
    return gamma_fn((d - beta) / 2.0) / (2.0 ** beta * np.pi ** (d / 2.0) * gamma_fn(beta / 2.0))


def free_green_stable(alpha: float, d: int, r) -> np.ndarray | float:
    beta = 2.0 * alpha
    return riesz_constant(d, beta) * np.asarray(r, dtype=float) ** (beta - d)


def free_green(spec: BernsteinSpec, d: int, r: float) -> GreenEnvelope:
    """Envelope shape r^-d Phi(r) for the free Green function.

    The envelope constant is 1 (shape only); for the stable family the
    exact Riesz value is attached in the formula tag and is returned as
    both endpoints scaled by the ratio exact/shape.
    """
    spec.check_dim_cap(d)
    if r <= 0:
        raise ValueError("r must be positive")
    shape = r ** (-d) * phi_cap(spec, r)
    if spec.family == "stable":
        exact = float(free_green_stable(spec.alpha, d, r))
        return GreenEnvelope(exact, exact, "stable-riesz")
    return GreenEnvelope(shape, shape, "shape-rd-phi")


def ball_green_stable(alpha: float, d: int, r: float, x, y) -> np.ndarray | float:
    """Exact Green function of the ball B(0, r) for the isotropic 2*alpha-stable
    process (Blumenthal-Getoor-Ray formula via the regularized incomplete beta).

    Vectorized over trailing point axes; x = y returns +inf.
    """
    beta = 2.0 * alpha
    if not 0 < beta < min(2.0, d):
        raise ValueError("need 2*alpha < min(2, d)")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape[-1] != d or y.shape[-1] != d:
        raise ValueError("points must have last axis of length d")
    nx = np.linalg.norm(x, axis=-1)
    ny = np.linalg.norm(y, axis=-1)
    if np.any(nx >= r) or np.any(ny >= r):
        raise ValueError("points must be interior to the ball")
    dxy = np.linalg.norm(x - y, axis=-1)
    with np.errstate(divide="ignore"):
        z = (r * r - nx * nx) * (r * r - ny * ny) / (r * r * dxy * dxy)
    const = gamma_fn(d / 2.0) / (2.0 ** beta * np.pi ** (d / 2.0) * gamma_fn(beta / 2.0) ** 2)
    full_beta = beta_fn(beta / 2.0, (d - beta) / 2.0)
    frac = betainc(beta / 2.0, (d - beta) / 2.0, z / (1.0 + z))
    with np.errstate(divide="ignore"):
        out = const * full_beta * frac * dxy ** (beta - d)
    out = np.where(dxy == 0.0, np.inf, out)
    return out if out.shape else float(out)


def ball_green_envelope(spec: BernsteinSpec, d: int, geom: BallGeometry,
                        x, y) -> np.ndarray | float:
    """Shape value of the two-sided ball Green estimate (constants = 1):

        (Phi(|x-y|) / |x-y|^d) * (1 and Phi(dx)^0.5 Phi(dy)^0.5 / Phi(|x-y|))

    Stated for ball radii <= 1.
    """
    if geom.radius > 1.0:
        raise ValueError("ball Green estimate is stated for radius <= 1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    dx = geom.dist_to_boundary(x)
    dy = geom.dist_to_boundary(y)
    if np.any(dx < 0) or np.any(dy < 0):
        raise ValueError("points must be interior")
    dxy = np.linalg.norm(x - y, axis=-1)
    if np.any(dxy == 0):
        raise ValueError("x and y must be distinct")
    phi_xy = np.asarray(phi_cap(spec, dxy))
    bdry = np.sqrt(_phi_cap_safe(spec, dx) * _phi_cap_safe(spec, dy))
    shape = phi_xy / dxy ** d * np.minimum(1.0, bdry / phi_xy)
    return shape if shape.shape else float(shape)


def _phi_cap_safe(spec, s):
    """Phi extended by Phi(0) = 0."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    if np.any(pos):
        out[pos] = phi_cap(spec, s[pos])
    return out


def _green_value(spec, d, geom, x, y):
    if spec.family == "stable":
        return ball_green_stable(spec.alpha, d, geom.radius,
                                 np.asarray(x) - geom.center, np.asarray(y) - geom.center)
    return ball_green_envelope(spec, d, geom, x, y)


def three_g_check(spec: BernsteinSpec, d: int, geom: BallGeometry,
                  x, y, z, w, c4: float = 1.0):
    """Evaluate the 3G ratio G(x,y) G(z,w) / G(x,w) against its bound.

    The bound branches on membership of (x, w) in

        E_r = {(x, w): |x - w| <= max(delta(x), delta(w)) / 2}.

    Returns dict(s) with ratio, bound (without constant), membership flag
    and the PASS flag at calibration constant `c4`.
    """
    x, y, z, w = (np.atleast_2d(np.asarray(p, dtype=float)) for p in (x, y, z, w))
    g_xy = np.asarray(_green_value(spec, d, geom, x, y))
    g_zw = np.asarray(_green_value(spec, d, geom, z, w))
    g_xw = np.asarray(_green_value(spec, d, geom, x, w))
    if np.any(g_xw == 0):
        raise ZeroDivisionError("G(x, w) vanishes for a supplied quadruple")
    ratio = g_xy * g_zw / g_xw

    dxw = np.linalg.norm(x - w, axis=-1)
    dxy = np.linalg.norm(x - y, axis=-1)
    dzw = np.linalg.norm(z - w, axis=-1)
    delta_x = geom.dist_to_boundary(x)
    delta_w = geom.dist_to_boundary(w)
    in_er = dxw <= 0.5 * np.maximum(delta_x, delta_w)

    phi_xy = np.asarray(phi_cap(spec, dxy))
    phi_zw = np.asarray(phi_cap(spec, dzw))
    phi_xw = np.asarray(phi_cap(spec, dxw))
    geom_factor = dxw ** d / (dxy ** d * dzw ** d)
    bound_in = phi_xy * phi_zw / phi_xw * geom_factor
    bound_out = np.sqrt(phi_xy * phi_zw) * geom_factor
    bound = np.where(in_er, bound_in, bound_out)

    return {
        "ratio": ratio if ratio.shape else float(ratio),
        "bound": bound if bound.shape else float(bound),
        "in_Er": in_er if in_er.shape else bool(in_er),
        "passed": ratio <= c4 * bound,
    }


def _sample_interior(rng, n, d, radius, margin=1e-6):
    pts = rng.uniform(-radius, radius, size=(int(n * (2.5 ** d) + 64), d))
    pts = pts[np.linalg.norm(pts, axis=-1) < radius * (1 - margin)]
    while len(pts) < n:
        extra = rng.uniform(-radius, radius, size=(n, d))
        extra = extra[np.linalg.norm(extra, axis=-1) < radius * (1 - margin)]
        pts = np.concatenate([pts, extra])
    return pts[:n]


def three_g_calibrate(spec: BernsteinSpec, d: int, geom: BallGeometry,
                      n: int, seed: int) -> dict:
    """Empirical C4: sup of ratio/bound over n random quadruples."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    pts = _sample_interior(rng, 4 * n, d, geom.radius) + geom.center
    x, y, z, w = pts[:n], pts[n:2 * n], pts[2 * n:3 * n], pts[3 * n:]
    res = three_g_check(spec, d, geom, x, y, z, w)
    ratios = np.asarray(res["ratio"]) / np.asarray(res["bound"])
    return {
        "seed": seed,
        "C4_empirical": float(np.max(ratios)),
        "quadruple_count": int(n),
        "in_Er_fraction": float(np.mean(res["in_Er"])),
    }


# -- key double integral -------------------------------------------------------


def _graded_inner_nodes(y, lo, hi, n, power=3.0):
    """Nodes on (lo, hi) clustered toward y (graded power map on each side)."""
    q, wq = roots_legendre(n)
    u = 0.5 * (q + 1.0)
    du = 0.5 * wq
    segs = []
    for a in (lo, hi):
        length = abs(a - y)
        if length <= 0:
            continue
        t = u ** power
        jac = power * u ** (power - 1.0) * length
        z = y + np.sign(a - y) * t * length
        segs.append((z, du * jac))
    z = np.concatenate([s[0] for s in segs])
    w = np.concatenate([s[1] for s in segs])
    return z, w


def key_integral(spec: BernsteinSpec, d: int, geom: BallGeometry, F,
                 x: float | np.ndarray, w: float | np.ndarray,
                 n_outer: int = 48, n_inner: int = 40) -> float:
    """Double integral of G(x,y) G(z,w) / G(x,w) F(y,z) j(|y-z|) over the ball.

    Implemented for d = 1 with a tensorized rule: Gauss-Legendre in y,
    power-graded nodes in z clustered at the j singularity z = y.  The
    value is symmetrized over (x, w), which the exact integral allows by
    the symmetry of G and F.
    """
    if d != 1:
        raise NotImplementedError("key integral implemented for d = 1")
    x = float(np.ravel(x)[0])
    w = float(np.ravel(w)[0])

    def one_sided(xa, wa):
        c = float(geom.center[0])
        r = geom.radius
        q, wq = roots_legendre(n_outer)
        y = c + q * r * (1 - 1e-9)
        wy = wq * r
        g_xw = float(np.asarray(_green_value(spec, 1, geom, [[xa]], [[wa]])).ravel()[0])
        g_xy = np.asarray(_green_value(
            spec, 1, geom, np.full((n_outer, 1), xa), y[:, None]))
        total = 0.0
        for yi, wyi, gxyi in zip(y, wy, g_xy):
            z, wz = _graded_inner_nodes(yi, c - r * (1 - 1e-9), c + r * (1 - 1e-9), n_inner)
            g_zw = np.asarray(_green_value(
                spec, 1, geom, z[:, None], np.full((len(z), 1), wa)))
            fv = F(np.full((len(z), 1), yi), z[:, None])
            jv = np.asarray(jump_density(spec, 1, np.abs(z - yi)))
            total += wyi * np.sum(wz * g_zw * fv * jv) * gxyi / g_xw
        return total

    return 0.5 * (one_sided(x, w) + one_sided(w, x))


def _sweep_pairs(r: float):
    offs = np.array([-0.75, -0.3, 0.0, 0.45, 0.9]) * r
    pairs = [(a, b) for a in offs for b in offs if a < b]
    return pairs


def key_integral_sweep(spec: BernsteinSpec, d: int, radii, F_of_r,
                       n_outer: int = 48, n_inner: int = 40) -> dict:
    """Sup over a deterministic (x, w) sample for each radius + log-log fit.

    `F_of_r` maps a radius to the functional used inside B(0, r) (the
    truncated Fuchsian profile depends on the ball in sweep mode).
    """
    radii = np.asarray(radii, dtype=float)
    sups = []
    for r in radii:
        geom = BallGeometry(np.zeros(d), float(r))
        F = F_of_r(float(r))
        vals = [key_integral(spec, d, geom, F, a, b, n_outer, n_inner)
                for a, b in _sweep_pairs(float(r))]
        sups.append(max(vals))
    sups = np.array(sups)
    slope, intercept = np.polyfit(np.log(radii), np.log(sups), 1)
    return {"radii": radii, "sup_integral": sups,
            "slope_fit": float(slope), "intercept": float(intercept)}


def r0_solve(spec: BernsteinSpec, d: int, beta: float, C: float, epsilon: float,
              F_of_r=None, k_max: int = 12, **kw) -> dict:
    """Largest dyadic radius r0 = 2^-k <= 1 with sup key integral < epsilon."""
    if epsilon <= 0 or beta <= 1:
        raise ValueError("need epsilon > 0 and beta > 1")
    if F_of_r is None:
        from .functionals import truncated_profile_functional
        prof = truncated_profile_functional(spec, beta, C)
        F_of_r = lambda r: prof
    last_val = None
    for k in range(k_max + 1):
        r = 2.0 ** -k
        geom = BallGeometry(np.zeros(d), r)
        F = F_of_r(r)
        vals = [key_integral(spec, d, geom, F, a, b, **kw) for a, b in _sweep_pairs(r)]
        last_val = max(vals)
        if last_val < epsilon:
            return {"r0": r, "sup_at_r0": last_val, "converged": True}
    return {"r0": 2.0 ** -k_max, "sup_at_r0": last_val, "converged": False}


# -- Poisson kernel ------------------------------------------------------------


def poisson_kernel(spec: BernsteinSpec, d: int, geom: BallGeometry, x, z,
                   n_quad: int = 200) -> float:
    """P_B(x, z) = int_B G_B(x, y) j(|y - z|) dy by quadrature (d = 1)."""
    if d != 1:
        raise NotImplementedError("Poisson kernel quadrature implemented for d = 1")
    x = float(np.ravel(x)[0])
    z = float(np.ravel(z)[0])
    c = float(geom.center[0])
    r = geom.radius
    if abs(z - c) <= r:
        raise ValueError("z must be exterior to the closed ball")
    q, wq = roots_legendre(n_quad)
    y = c + q * r * (1 - 1e-10)
    wy = wq * r
    g = np.asarray(_green_value(spec, 1, geom, y[:, None], np.full((n_quad, 1), x)))
    j = np.asarray(jump_density(spec, 1, np.abs(y - z)))
    return float(np.sum(wy * g * j))


def poisson_lower_check(spec: BernsteinSpec, d: int, geom: BallGeometry,
                        z_grid) -> EstimateReport:
    """Empirical C3 in P(0, z) >= C3 j(|z|) Phi(r) over an exterior grid."""
    r = geom.radius
    if r > 1.0:
        raise ValueError("Poisson lower bound stated for radius <= 1")
    z_grid = np.asarray(z_grid, dtype=float)
    if np.any(np.abs(z_grid - geom.center[0]) <= r):
        raise ValueError("z grid must be exterior")
    ratios = []
    phir = phi_cap(spec, r)
    for z in z_grid:
        p = poisson_kernel(spec, d, geom, geom.center, z)
        jz = jump_density(spec, d, abs(z - geom.center[0]))
        ratios.append(p / (jz * phir))
    ratios = np.array(ratios)
    c3 = float(ratios.min())
    return EstimateReport(
        name="poisson-lower-bound",
        estimate=c3,
        verdict=PASS if c3 > 0 and np.all(np.isfinite(ratios)) else FAIL,
        details={"z": z_grid, "ratios": ratios, "ratio_max": float(ratios.max())},
    )
