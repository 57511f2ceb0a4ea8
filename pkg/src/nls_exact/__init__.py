"""Exact solution families of the 2D cubic NLS and its coupled pair.

Modules: ``special_functions`` (Jacobi sn/cn/dn, K), ``catalog`` (solution
families), ``symmetry`` (T1/T2/Swap actions), ``residual`` (FD
certification), ``propagator`` (split-step cross-check) and ``cli``.
"""

from .catalog import (
    CoupledPhys,
    SinglePhys,
    SolutionInstance,
    amplitude_phase,
    describe,
    evaluate,
    instantiate,
    list_families,
    singular_distance,
)
from .errors import NLSError
from .residual import ResidualReport, SamplingConfig, verify_instance
from .special_functions import complete_k, jacobi
from .symmetry import SymmetryOp, apply, apply_all, residual_certify

__version__ = "0.1.0"

__all__ = [
    "CoupledPhys", "SinglePhys", "SolutionInstance", "amplitude_phase", "describe",
    "evaluate", "instantiate", "list_families", "singular_distance", "NLSError",
    "ResidualReport", "SamplingConfig", "verify_instance", "complete_k", "jacobi",
    "SymmetryOp", "apply", "apply_all", "residual_certify",
]
