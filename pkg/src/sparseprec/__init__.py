"""Sparse precision matrix estimation with greedy inverse scale space column solvers."""
from ._kernels import BACKEND
from .baselines import AdmmConfig, HtpConfig, admm_solve_column, admm_solve_columns, htp_solve_column
from .clime import EstimatorConfig, PrecisionEstimate, check_lemma1_hypothesis, estimate_precision, symmetrize
from .errors import (BoundDegenerate, DegenerateDraw, DimensionMismatch, NoCrossing, NotPositiveDefinite,
                     NumericalError, RankDeficient, SparsePrecError, TooFewSamples, ZeroGradient)
from .giss import GissConfig, GissResult, GissState, Termination, giss_init, giss_solve_column, giss_step
from .linalg import cholesky, extreme_eigenvalues, restricted_least_squares, spectral_norm
from .metrics import MetricsReport, compare, gaussian_stop_thresholds, incoherence, theorem_bounds
from .simulation import GroundTruth, ScenarioSpec, gen_case1, gen_case2, sample_covariance, sample_gaussian

__version__ = "0.1.0"
