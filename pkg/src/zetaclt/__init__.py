"""Hermite expansion of the distribution of log zeta(sigma_T + it).

Coefficient tables, the density and rectangle probabilities of the
expansion, and three independent checks on them: Monte-Carlo sampling of
the random Euler product, Fourier inversion of its characteristic
function, and log zeta evaluated on the line itself.
"""

from ._backend import NAME as BACKEND
from .coeffs import CoeffTable, ExpansionParams, b_prime_table, b_tilde_table, d_table
from .density import DensityModel, Rectangle, density_F, rect_probability, rect_probability_detail
from .errors import (
    BranchError,
    CapacityError,
    DomainError,
    OrderError,
    PoleError,
    PrecisionError,
    QualityError,
    RangeError,
    ZetaCLTError,
)
from .hermite import hermite_rect_integral
from .primes import prime_zeta, psi_T, sigma_T
from .randmodel import EmpiricalMeasure, RandomEulerConfig, sample_log_zeta_random
from .series import ConjugateSeries, TruncatedSeries, a_series, b_series
from .zetaline import ZetaEvalConfig, empirical_zeta_measure, log_zeta_line, zeta_em

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CoeffTable",
    "ExpansionParams",
    "b_prime_table",
    "b_tilde_table",
    "d_table",
    "DensityModel",
    "Rectangle",
    "density_F",
    "rect_probability",
    "rect_probability_detail",
    "BranchError",
    "CapacityError",
    "DomainError",
    "OrderError",
    "PoleError",
    "PrecisionError",
    "QualityError",
    "RangeError",
    "ZetaCLTError",
    "hermite_rect_integral",
    "prime_zeta",
    "psi_T",
    "sigma_T",
    "EmpiricalMeasure",
    "RandomEulerConfig",
    "sample_log_zeta_random",
    "ConjugateSeries",
    "TruncatedSeries",
    "a_series",
    "b_series",
    "ZetaEvalConfig",
    "empirical_zeta_measure",
    "log_zeta_line",
    "zeta_em",
]
