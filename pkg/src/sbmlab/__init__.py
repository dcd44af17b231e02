"""Simulation and quadrature toolkit for jump functionals of subordinate
Brownian motions."""

__version__ = "0.1.0"

from .bernstein import (
    BernsteinSpec,
    stable_spec,
    mixture_spec,
    custom_spec,
    phi_eval,
    phi_cap,
    phi_cap_inverse,
    verify_scaling,
    rescale,
)
from .levy_kernel import (
    jump_density,
    jump_density_table,
    levy_system_rate,
    kato_integral,
)
from .green import (
    BallGeometry,
    ball_green_envelope,
    free_green,
    key_integral,
    key_integral_sweep,
    r0_solve,
    three_g_calibrate,
    three_g_check,
)
from .sampler import (
    rng_for,
    sample_marginal,
    sample_sbm_path,
    sample_subordinator,
    batch_first_exit,
    choose_M,
    scaling_identity_ks,
)
from .functionals import (
    FunctionalSpec,
    expected_functional_mc,
    gauge_estimate,
    harnack_probe,
    make_counterexample,
    make_fuchsian,
    truncated_profile_functional,
)
from .girsanov import (
    doleans_weight,
    entropy_estimate,
    f2_horizon_sweep,
    make_entropy_counterexample,
    martingale_check,
)
from .reports import EstimateReport

__all__ = [
    "BallGeometry",
    "ball_green_envelope",
    "free_green",
    "key_integral",
    "key_integral_sweep",
    "r0_solve",
    "three_g_calibrate",
    "three_g_check",
    "rng_for",
    "sample_marginal",
    "sample_sbm_path",
    "sample_subordinator",
    "batch_first_exit",
    "choose_M",
    "scaling_identity_ks",
    "FunctionalSpec",
    "expected_functional_mc",
    "gauge_estimate",
    "harnack_probe",
    "make_counterexample",
    "make_fuchsian",
    "truncated_profile_functional",
    "doleans_weight",
    "entropy_estimate",
    "f2_horizon_sweep",
    "make_entropy_counterexample",
    "martingale_check",
    "BernsteinSpec",
    "stable_spec",
    "mixture_spec",
    "custom_spec",
    "phi_eval",
    "phi_cap",
    "phi_cap_inverse",
    "verify_scaling",
    "rescale",
    "jump_density",
    "jump_density_table",
    "levy_system_rate",
    "kato_integral",
    "EstimateReport",
]
