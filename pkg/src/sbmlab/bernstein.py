"""Complete Bernstein functions, the scale function and weak scaling checks.

The toolkit works with Laplace exponents phi normalized to phi(1) = 1 and
with the scale function Phi(s) = 1 / phi(s^-2).  Three families are
supported:

* ``stable``:   phi(lam) = lam**alpha, alpha in (0, 1),
* ``mixture``:  phi(lam) = sum_i w_i lam**alpha_i with weights normalized
  so that phi(1) = 1,
* ``custom``:   phi obtained by numerically Laplace-transforming a
  user-supplied Levy density mu(t), again normalized at construction.

The scaling constants (a1, a2, delta1, delta2) are user supplied and only
ever *verified* on grids, never inferred.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

__all__ = [
    "BernsteinSpec",
    "ScalingReport",
    "stable_spec",
    "mixture_spec",
    "custom_spec",
    "phi_eval",
    "phi_cap",
    "phi_cap_inverse",
    "verify_scaling",
    "rescale",
]


@dataclass(frozen=True)
class BernsteinSpec:
    """Immutable description of a normalized complete Bernstein function."""

    family: str
    a1: float
    a2: float
    delta1: float
    delta2: float
    alpha: float | None = None
    mixture_terms: tuple[tuple[float, float], ...] = ()
    mu_raw: Callable[[np.ndarray], np.ndarray] | None = field(
        default=None, compare=False, repr=False
    )
    mu_norm: float = 1.0  # custom family: phi = raw Laplace transform / mu_norm

    def __post_init__(self):
        if self.family not in ("stable", "mixture", "custom"):
            raise ValueError(f"unknown family {self.family!r}")
        if not (0 < self.delta1 <= self.delta2 < 1):
            raise ValueError("need 0 < delta1 <= delta2 < 1")
        if self.a1 <= 0 or self.a2 <= 0:
            raise ValueError("a1, a2 must be positive")
        if self.family == "stable":
            if self.alpha is None or not (0 < self.alpha < 1):
                raise ValueError("stable family needs alpha in (0, 1)")
        if self.family == "mixture":
            if not self.mixture_terms:
                raise ValueError("mixture family needs mixture_terms")
            for w, a in self.mixture_terms:
                if w <= 0 or not (0 < a < 1):
                    raise ValueError("mixture terms must have w > 0, a in (0,1)")
        if self.family == "custom" and self.mu_raw is None:
            raise ValueError("custom family needs a Levy density")

    def check_dim_cap(self, d: int) -> None:
        """Transience constraint delta2 < 1 and d/2 for the intended dimension."""
        if not self.delta2 < min(1.0, d / 2.0):
            raise ValueError(
                f"delta2={self.delta2} violates delta2 < 1 and d/2 for d={d} (transience)"
            )

    def to_dict(self) -> dict:
        doc = {
            "family": self.family,
            "a1": self.a1,
            "a2": self.a2,
            "delta1": self.delta1,
            "delta2": self.delta2,
        }
        if self.family == "stable":
            doc["alpha"] = self.alpha
        elif self.family == "mixture":
            doc["mixture_terms"] = [[w, a] for w, a in self.mixture_terms]
        else:
            raise ValueError("custom specs are not JSON-serializable")
        return doc

    @staticmethod
    def from_dict(doc: dict) -> "BernsteinSpec":
        family = doc["family"]
        kwargs = dict(
            a1=doc["a1"], a2=doc["a2"], delta1=doc["delta1"], delta2=doc["delta2"]
        )
        if family == "stable":
            return stable_spec(doc["alpha"], **kwargs)
        if family == "mixture":
            terms = [(w, a) for w, a in doc["mixture_terms"]]
            return mixture_spec(terms, **kwargs)
        raise ValueError(f"cannot deserialize family {family!r}")


def stable_spec(alpha: float, a1: float = 1.0, a2: float = 1.0,
                delta1: float | None = None, delta2: float | None = None) -> BernsteinSpec:
    """phi(lam) = lam**alpha; scaling holds with delta1 = delta2 = alpha, a1 = a2 = 1."""
    if delta1 is None:
        delta1 = alpha
    if delta2 is None:
        delta2 = alpha
    return BernsteinSpec("stable", a1, a2, delta1, delta2, alpha=alpha)


def mixture_spec(terms: Sequence[tuple[float, float]], a1: float = 1.0, a2: float = 1.0,
                 delta1: float | None = None, delta2: float | None = None) -> BernsteinSpec:
    """Normalized mixture of stable exponents; weights rescaled so phi(1) = 1."""
    if not terms:
        raise ValueError("mixture family needs mixture_terms")
    total = sum(w for w, _ in terms)
    norm = tuple((w / total, a) for w, a in terms)
    alphas = [a for _, a in norm]
    if delta1 is None:
        delta1 = min(alphas)
    if delta2 is None:
        delta2 = max(alphas)
    return BernsteinSpec("mixture", a1, a2, delta1, delta2, mixture_terms=norm)


def custom_spec(mu: Callable[[np.ndarray], np.ndarray], a1: float, a2: float,
                delta1: float, delta2: float) -> BernsteinSpec:
    """Custom complete Bernstein function given by its Levy density mu(t).

    phi is evaluated by quadrature of the Laplace-transform representation
    and normalized so that phi(1) = 1.
    """
    spec = BernsteinSpec("custom", a1, a2, delta1, delta2, mu_raw=mu)
    norm = _phi_custom_raw(spec, np.array([1.0]))[0]
    return replace(spec, mu_norm=float(norm))


def _phi_custom_raw(spec: BernsteinSpec, lam: np.ndarray) -> np.ndarray:
    # integral (1 - e^{-lam t}) mu(t) dt on a log grid; the integrand decays
    # like t mu(t) near 0 and like mu(t) at infinity.
    out = np.empty_like(lam, dtype=float)
    for i, lv in np.ndenumerate(lam):
        def f(u):
            t = np.exp(u)
            return -np.expm1(-lv * t) * spec.mu_raw(t) * t

        lo = np.log(1.0 / lv) - 45.0
        hi = np.log(1.0 / lv) + 60.0 / spec.delta1
        val, _ = integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-10, limit=400)
        out[i] = val
    return out


def phi_eval(spec: BernsteinSpec, lam) -> np.ndarray | float:
    """Evaluate the normalized Laplace exponent phi(lam) for lam > 0."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr <= 0):
        raise ValueError("phi is only defined for positive arguments")
    if spec.family == "stable":
        out = lam_arr ** spec.alpha
    elif spec.family == "mixture":
        out = sum(w * lam_arr ** a for w, a in spec.mixture_terms)
    else:
        out = _phi_custom_raw(spec, np.atleast_1d(lam_arr)) / spec.mu_norm
        out = out.reshape(lam_arr.shape)
    return out if np.ndim(lam) else float(out)


def phi_cap(spec: BernsteinSpec, s) -> np.ndarray | float:
    """Scale function Phi(s) = 1 / phi(s^-2); strictly increasing on (0, inf)."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr <= 0):
        raise ValueError("Phi is only defined for positive arguments")
    out = 1.0 / phi_eval(spec, s_arr ** -2.0)
    return out if np.ndim(s) else float(out)


def phi_cap_inverse(spec: BernsteinSpec, value: float, tol: float = 1e-12) -> float:
    """Numeric inverse of Phi by monotone bracketing and Brent's method."""
    if value <= 0:
        raise ValueError("Phi only takes positive values")
    lo, hi = 1.0, 1.0
    while phi_cap(spec, lo) > value:
        lo /= 8.0
        if lo < 1e-300:
            raise ArithmeticError("Phi inverse bracketing failed from below")
    while phi_cap(spec, hi) < value:
        hi *= 8.0
        if hi > 1e300:
            raise ArithmeticError("Phi inverse bracketing failed from above")
    root = optimize.brentq(lambda s: phi_cap(spec, s) - value, lo, hi,
                           xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=300)
    resid = phi_cap(spec, root) - value
    if abs(resid) > tol * max(1.0, value):
        raise ArithmeticError(f"Phi inverse did not converge, residual {resid:.3e}")
    return float(root)


@dataclass
class ScalingReport:
    passed: bool
    worst_slack: float
    violations: list[tuple[float, float]]
    phi_bound_passed: bool

    def __bool__(self) -> bool:
        return self.passed and self.phi_bound_passed


def verify_scaling(spec: BernsteinSpec, grid: Sequence[tuple[float, float]]) -> ScalingReport:
    """Check a1 lam^d1 <= phi(lam x)/phi(x) <= a2 lam^d2 on a (lam, x) grid.

    Also checks the derived bound Phi(s) <= a1^-1 s^(2 delta1) at grid
    points with s = x <= 1.  The worst-case slack is the smallest margin by
    which the sandwich holds (0 means an inequality is tight; negative
    slack means violation).
    """
    pts = list(grid)
    if not pts:
        raise ValueError("grid must be nonempty")
    lam = np.array([p[0] for p in pts], dtype=float)
    x = np.array([p[1] for p in pts], dtype=float)
    if np.any(lam < 1) or np.any(x <= 0):
        raise ValueError("grid needs lam >= 1 and x > 0")

    ratio = phi_eval(spec, lam * x) / phi_eval(spec, x)
    lower = spec.a1 * lam ** spec.delta1
    upper = spec.a2 * lam ** spec.delta2
    slack = np.minimum(ratio - lower, upper - ratio)
    bad = slack < -1e-12 * np.maximum(ratio, 1.0)
    violations = [(float(l), float(xx)) for l, xx in zip(lam[bad], x[bad])]

    s = x[x <= 1.0]
    if s.size:
        phi_bound_ok = bool(
            np.all(phi_cap(spec, s) <= (1.0 / spec.a1) * s ** (2 * spec.delta1) * (1 + 1e-12))
        )
    else:
        phi_bound_ok = True
    return ScalingReport(
        passed=not violations,
        worst_slack=float(slack.min()),
        violations=violations,
        phi_bound_passed=phi_bound_ok,
    )


def rescale(spec: BernsteinSpec, R: float) -> BernsteinSpec:
    """Spec of the rescaled exponent phi_R(s) = phi(R^-2 s) / phi(R^-2).

    The result is again normalized (phi_R(1) = 1 by construction) and
    carries the same scaling constants.  The stable family is exactly
    scale invariant; mixtures stay mixtures with reweighted terms.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    if R == 1.0 or spec.family == "stable":
        return spec
    if spec.family == "mixture":
        denom = phi_eval(spec, R ** -2.0)
        terms = tuple((w * R ** (-2 * a) / denom, a) for w, a in spec.mixture_terms)
        return replace(spec, mixture_terms=terms)
    # custom: the Levy measure of phi(R^-2 s)/phi(R^-2) is R^2 mu(R^2 t)/phi(R^-2)
    base_mu = spec.mu_raw
    base_norm = spec.mu_norm
    denom = phi_eval(spec, R ** -2.0)

    def mu_scaled(t, _R=R, _mu=base_mu, _c=base_norm * denom):
        return _R ** 2 * _mu(_R ** 2 * np.asarray(t)) / _c

    out = BernsteinSpec(
        "custom", spec.a1, spec.a2, spec.delta1, spec.delta2, mu_raw=mu_scaled
    )
    norm = _phi_custom_raw(out, np.array([1.0]))[0]
    return replace(out, mu_norm=float(norm))
