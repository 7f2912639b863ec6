"""
Robust fitting component initialization
Exposes main interfaces
"""
from .testing import (
    kuiper_d_minus, p_value, log_p_value, log_alpha, alpha,
    KuiperOutcome, evaluate_memberships, test_statistic_for, prefilter_columns
)
from .selection import (
    factor_correlation, correlation_matrix, conflict_graph,
    maximal_independent_sets, select_mis, assign_exclusive
)
from .metrics import misclassification_error, labels_from_memberships, labels_from_models
from .pipeline import refit_from_factor, fit_models, FittingLoop

__all__ = [
    'kuiper_d_minus',
    'p_value',
    'log_p_value',
    'log_alpha',
    'alpha',
    'KuiperOutcome',
    'evaluate_memberships',
    'test_statistic_for',
    'prefilter_columns',
    'factor_correlation',
    'correlation_matrix',
    'conflict_graph',
    'maximal_independent_sets',
    'select_mis',
    'assign_exclusive',
    'misclassification_error',
    'labels_from_memberships',
    'labels_from_models',
    'refit_from_factor',
    'fit_models',
    'FittingLoop'
]
