"""Predictive density estimation under Wasserstein-2 loss."""

from ._core import (
    __version__,
    empirical_w2,
    empirical_w2_1d,
    equivariant_c,
    gelbrich_bound,
    hier_estimate,
    james_stein,
    phi0,
    posterior_lambda_mean,
    risk_curve,
    stein_variance,
    w2_gaussian,
)

__all__ = [
    "__version__",
    "empirical_w2",
    "empirical_w2_1d",
    "equivariant_c",
    "gelbrich_bound",
    "hier_estimate",
    "james_stein",
    "phi0",
    "posterior_lambda_mean",
    "risk_curve",
    "stein_variance",
    "w2_gaussian",
]
