"""
Preference component initialization
Exposes main interfaces
"""
from .sampler import sample_pool, hypothesis_rng
from .matrix import (
    build_preference, largest_column, consensus_init, deactivate_columns,
    deflate_columns, active_submatrix, write_preference_csv
)

__all__ = [
    'sample_pool',
    'hypothesis_rng',
    'build_preference',
    'largest_column',
    'consensus_init',
    'deactivate_columns',
    'deflate_columns',
    'active_submatrix',
    'write_preference_csv'
]
