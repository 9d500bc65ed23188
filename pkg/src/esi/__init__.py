"""Extended source inversion for single-trace acoustic transmission data."""

from .signal import (AnalyticWavelet, NoiseSpec, SampledWavelet, TimeGrid, Trace,
                     make_coherent_noise, make_filtered_random_noise, norm, norm_sq,
                     ricker_eval)
from .forward import (Geometry, SlownessInterval, adjoint, forward_analytic,
                      forward_sampled, lag_grid_for)
from .objectives import (EvalRecord, e_basic, e_reduced_fwi, e_restricted, g_penalty,
                         grad_j_reduced, j_reduced, solve_w_alpha)
from .optimize import (DiscrepancyBounds, SolverConfig, alpha_update_cycle, brent_zero,
                       discrepancy_solve, truncate_and_report)
from .bounds import eps_min, f_eta, lambda_min, result1_predicate, result2_radius
from .experiments import load_config, run_experiment

__version__ = "0.1.0"
