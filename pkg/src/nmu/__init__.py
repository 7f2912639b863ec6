"""
NMU component initialization
Exposes main interfaces
"""
from .admm import (
    admm_step, init_svd, solve_rank_one, polish_feasibility,
    rescale_factors, augmented_lagrangian
)
from .factors import extract_factors, deflate, factor_energy, svd_deflation, write_factors

__all__ = [
    'admm_step',
    'init_svd',
    'solve_rank_one',
    'polish_feasibility',
    'rescale_factors',
    'augmented_lagrangian',
    'extract_factors',
    'deflate',
    'factor_energy',
    'svd_deflation',
    'write_factors'
]
