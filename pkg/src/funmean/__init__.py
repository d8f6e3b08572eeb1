"""Arithmetic, harmonic, geometric and logarithmic means of convex functions
on a grid, their SPD-matrix counterparts, and randomised checks of the
inequalities between them."""
from .convex_core import GridFn, QuadraticFn, Samples, SpdMatrix, convexify
from .errors import (ConditioningError, ConfigurationError, ConvergenceError, DimensionError,
                     FunmeanError, ImproperError, NotConvexError)
from .extreal import NEG_INF, POS_INF, ExtReal
from .fenchel import biconjugate, conjugate, fenchel_gap, inf_conv_brute, inf_conv_dual
from .functional_means import (arith, diamond, family_G, family_U, geometric, harmonic,
                               log_mean_geo, log_mean_harm)
from .operator_means import (op_arith, op_diamond, op_geom, op_harm, op_log_mean,
                             op_log_mean_quad, parallel_sum, scalar_log_mean)

__version__ = "0.1.0"

__all__ = [
    "GridFn", "QuadraticFn", "Samples", "SpdMatrix", "convexify", "ExtReal", "POS_INF",
    "NEG_INF", "FunmeanError", "NotConvexError", "ImproperError", "ConditioningError",
    "ConfigurationError", "ConvergenceError", "DimensionError", "conjugate", "biconjugate",
    "fenchel_gap", "inf_conv_brute", "inf_conv_dual", "arith", "harmonic", "geometric",
    "log_mean_geo", "log_mean_harm", "family_G", "family_U", "diamond", "op_arith",
    "op_harm", "op_geom", "op_log_mean", "op_log_mean_quad", "op_diamond", "parallel_sum",
    "scalar_log_mean",
]
