"""Parabolic function spaces on grids and logarithmic Hölder inequality experiments."""

from .grid import (DilationMatrix, GridFunction, GridSpec, antiderivative_x, dilate,
                   quasi_norm, read_pgf, sample, spectral_derivative_x, write_pgf)
from .kernels import BACKEND
from .littlewood_paley import (besov_norm, build_filter_bank, decompose, lp_block,
                               reconstruct, square_function)
from .norms import (bmo_norm, holder_norm, holder_seminorm_t, holder_seminorm_x, log_plus,
                    lp_norm, norm_report, sup_norm)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "DilationMatrix", "GridFunction", "GridSpec", "antiderivative_x", "besov_norm",
    "bmo_norm", "build_filter_bank", "decompose", "dilate", "holder_norm", "holder_seminorm_t",
    "holder_seminorm_x", "log_plus", "lp_block", "lp_norm", "norm_report", "quasi_norm",
    "read_pgf", "reconstruct", "sample", "spectral_derivative_x", "square_function",
    "sup_norm", "write_pgf",
]
