"""Uniform transform of latent variables.

Fits a Gaussian mixture per latent column from the local extrema of a Gaussian
KDE, then maps each column through its mixture CDF onto a uniform range.
"""

from ._core import (
    Mixture,
    Model,
    UtError,
    apply,
    correlation_heatmap,
    estimate_density,
    factor_vae_score,
    fit,
    gaussian_kernel,
    invert,
    ks_uniform,
    mig,
    read_model,
    scott_bandwidth,
    synth,
    total_correlation,
    write_model,
)

__version__ = "0.1.0"

__all__ = [
    "Mixture",
    "Model",
    "UtError",
    "apply",
    "correlation_heatmap",
    "estimate_density",
    "factor_vae_score",
    "fit",
    "gaussian_kernel",
    "invert",
    "ks_uniform",
    "mig",
    "read_model",
    "scott_bandwidth",
    "synth",
    "total_correlation",
    "write_model",
]
