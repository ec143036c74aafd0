"""Generalized Dickman distributions and the Ornstein-Uhlenbeck type processes built on them."""

from .distribution import (
    DickmanParams,
    cdf,
    cumulant,
    density,
    ein,
    laplace_transform,
    make_params,
    pdf,
    pdf_recurrence,
    rho_solve,
    sample,
    sample_arrivals,
    sample_perpetuity,
    tail_bound,
)
from .errors import DickmanError, ParameterError, QuadratureError
from .rng import make_rng, spawn_rngs

__all__ = [
    "DickmanParams",
    "DickmanError",
    "ParameterError",
    "QuadratureError",
    "cdf",
    "cumulant",
    "density",
    "ein",
    "laplace_transform",
    "make_params",
    "make_rng",
    "pdf",
    "pdf_recurrence",
    "rho_solve",
    "sample",
    "sample_arrivals",
    "sample_perpetuity",
    "spawn_rngs",
    "tail_bound",
]
__version__ = "0.1.0"
