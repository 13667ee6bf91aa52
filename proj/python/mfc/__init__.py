"""Mean field particle toolkit.

Exact transport distances between weighted ensembles, Euler simulation of
interacting diffusions, finite-sample deviation bounds, and metric entropy
estimates for Hoelder balls. The heavy lifting lives in the compiled
extension; this package only re-exports it.
"""

from ._core import (
    __version__,
    beta_factor,
    covering_lower_bound_log,
    covering_lower_bound_validity,
    covering_upper_bound_log,
    holder_norm,
    inverse_normal_cdf,
    measure_cover_bound_log,
    relative_entropy,
    simulate,
    tail_bound,
    talagrand_margin,
    w1_dual_1d,
    wasserstein,
)

__all__ = [
    "__version__",
    "beta_factor",
    "covering_lower_bound_log",
    "covering_lower_bound_validity",
    "covering_upper_bound_log",
    "holder_norm",
    "inverse_normal_cdf",
    "measure_cover_bound_log",
    "relative_entropy",
    "simulate",
    "tail_bound",
    "talagrand_margin",
    "w1_dual_1d",
    "wasserstein",
]
