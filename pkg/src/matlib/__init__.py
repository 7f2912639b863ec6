"""
Dense linear-algebra substrate
Exposes main interfaces
"""
from .dense import (
    as_matrix, as_vector, require_nonnegative, project_nonneg,
    frobenius_norm, inf_norm, dot, outer, matvec, vecmat
)
from .svd import Svd1, rank_one_svd
from .csv_io import read_matrix_csv, write_matrix_csv

__all__ = [
    'as_matrix',
    'as_vector',
    'require_nonnegative',
    'project_nonneg',
    'frobenius_norm',
    'inf_norm',
    'dot',
    'outer',
    'matvec',
    'vecmat',
    'Svd1',
    'rank_one_svd',
    'read_matrix_csv',
    'write_matrix_csv'
]
