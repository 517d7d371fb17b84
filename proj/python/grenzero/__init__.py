"""Monotone density estimation near the origin.

Thin re-export of the compiled ``grenzero._core`` module. Families are
addressed by spec strings such as ``"beta:a=0.5"`` or
``"lehmann:gl=0.5,eps=0.3"``.
"""

from ._core import (
    ArgumentError,
    ConvergenceError,
    GrenanderEstimate,
    HGammaRealization,
    YGammaCdfResult,
    __version__,
    argmax_affine,
    cdf,
    contamination_density,
    density,
    estimate_epsilon,
    experiment_names,
    fit,
    lcm,
    log_poisson_pmf,
    normalizing_sequence,
    quantile,
    run_experiment,
    sample,
    simulate_hgamma,
    sup_relative_error,
    sup_statistic,
    tail_profile,
    validate_gnedenko,
    verify_switching,
    ygamma_bounds,
    ygamma_cdf,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
