"""Numerical laboratory for the convexity of optimization curves f(x_n)
produced by constant-stepsize first-order methods."""

from .constructions import (ImpossibilityWitness, effective_threshold, find_alpha_star,
                            impossibility_experiment, quadratic_delta_closed_form,
                            quadratic_divergence_check, s_function, sublevel_invariance_audit,
                            twostep_counterexample_config)
from .diagnostics import CurveReport, NogoGapReport, analyze_curve, nogo_gap, threshold_report
from .iterators import NoiseSchedule, Trajectory, TwoStepConfig, run_gd, run_inexact_gd, run_two_step
from .objectives import (HessianBound, Objective, PiecewiseQuadratic1D, QuadraticSpec,
                         make_logcosh_1d, make_piecewise_quadratic_1d, make_quadratic,
                         make_scaled_quadratic_1d, objective_from_dict)
from .search import SearchConfig, SearchResult, search_nonconvex_curve, verify_witness

__version__ = "0.1.0"
