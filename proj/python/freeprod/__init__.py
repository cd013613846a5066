"""Free random matrix products: analytic spectral laws and Monte Carlo checks."""

from ._freeprod import (
    Error,
    cumulants_to_moments,
    density,
    free_add,
    free_multiply,
    fuss_catalan_density,
    ginibre_product_cdf,
    ks_two_sample,
    moments_to_cumulants,
    quaternionic_product,
    radial_from_s_of_singular_law,
    spectrum,
)

__all__ = [
    "Error",
    "cumulants_to_moments",
    "density",
    "free_add",
    "free_multiply",
    "fuss_catalan_density",
    "ginibre_product_cdf",
    "ks_two_sample",
    "moments_to_cumulants",
    "quaternionic_product",
    "radial_from_s_of_singular_law",
    "spectrum",
]
