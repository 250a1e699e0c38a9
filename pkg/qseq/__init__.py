"""q-convex sequences, Chebyshev polynomials, power-mean constants and a certified fixed-point solver."""

from .chebyshev import cheb, cheb_t, cheb_u, identity_residuals, largest_root_t, largest_root_u, tau
from .contraction import (
    ContractionProblem,
    apply_operator,
    certificate,
    default_weights,
    solve_fixed_point,
    weighted_norm,
)
from .errors import (
    ConvergenceError,
    DomainError,
    NotContractionError,
    PreconditionError,
    QSeqError,
    UnsupportedError,
)
from .means import MeanSpec, c_constant, power_mean
from .sequences import AffineRep, Verdict, WindowSequence, classify

__version__ = "0.1.0"
