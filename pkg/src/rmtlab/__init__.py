"""rmtlab: a numerical laboratory for spectral fluctuations of random
matrices — semicircle-law plumbing, Wigner and beta-ensemble samplers, a
self-contained symmetric eigensolver, mesoscopic statistics, closed-form
variance/mean predictors, Dyson Brownian Motion coupling, and a Monte Carlo
harness that compares all of it against theory.
"""
from rmtlab._kernels import BACKEND as kernel_backend

__version__ = "0.1.0"

__all__ = ["kernel_backend", "__version__"]
