"""Implicit iteration methods in Hilbert scales for linear ill-posed problems.

The package solves ``A x = y`` from noisy data by

    x_k = x_{k-1} - (A^T A + alpha_k B^{2s})^{-1} A^T (A x_{k-1} - y_delta)

with the parameters chosen a priori or by the discrepancy principle
(geometric sequence, Newton-accelerated Tikhonov, or the Newton-driven
implicit iteration of :func:`algorithm1`).  Test problems are the
``deriv2`` Galerkin discretizations.
"""

from .errors import (
    DimensionError,
    DomainError,
    InfeasibleStart,
    NonTermination,
    NotSPDError,
    NumericalFailure,
)
from .filters import AlphaSequence, check_properties, eval_g, eval_r, oracle_solution
from .hilbert_scale import ScaleOperator, apply_power, build_scale_operator, power_matrix, scale_norm
from .iteration import (
    IterationConfig,
    LinearSetup,
    RunReport,
    discrepancy,
    error_norm,
    implicit_step,
    run_geometric,
    run_sequence,
)
from .param_rules import (
    AprioriInputs,
    IndexFunction,
    algorithm1,
    alpha_upper_bound,
    apriori_sigma_inv,
    newton_dp_tikhonov,
    power_index,
    psi_p,
    psi_p_inverse,
)
from .problems import NoisyData, TestProblem, add_noise, exact_pair, galerkin_deriv2, make_problem
from .spectral_core import laplacian_eigen, spd_factor, spd_solve, svd

__version__ = "0.1.0"
