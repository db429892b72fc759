"""Streaming canonical correlation analysis.

Two stochastic solvers work on whitened views with an inexact gradient:
matrix stochastic gradient (:mod:`streamcca.msg`) over the convex hull of
rank-``k`` partial isometries, and matrix exponentiated gradient
(:mod:`streamcca.meg`) over capped density matrices of the dilated problem.
"""

from .errors import (
    CCAError, DatasetFormatError, DegenerateError, InfeasibleError, InputError,
    NumericalError, SingularityError, StreamExhaustedError,
)
from .evaluation import GroundTruth, saa_solve, theory_constants
from .meg import run_meg
from .msg import run_msg
from .rounding import CcaSolution, extract_factors, round_meg, round_msg
from .whitening import StreamingWhitener, min_aux_size

__version__ = "0.1.0"

__all__ = [
    "CCAError", "CcaSolution", "DatasetFormatError", "DegenerateError", "GroundTruth",
    "InfeasibleError", "InputError", "NumericalError", "SingularityError",
    "StreamExhaustedError", "StreamingWhitener", "extract_factors", "min_aux_size",
    "round_meg", "round_msg", "run_meg", "run_msg", "saa_solve", "theory_constants",
]
