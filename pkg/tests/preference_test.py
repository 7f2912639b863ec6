import sys
import logging
from pathlib import Path

import numpy as np
import pytest

# Add the project root to the Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.errors import EmptyPreference, InvalidParams, PoolExhausted
from src.geometry import Circle2D, Line2D
from src.matlib import read_matrix_csv
from src.models import Hypothesis, PreferenceMatrix
from src.preference import (
    active_submatrix, build_preference, consensus_init, deflate_columns,
    largest_column, sample_pool, write_preference_csv
)

logger = logging.getLogger('test')

LINE = Line2D()


def _matrix(values):
    values = np.asarray(values, dtype=float)
    return PreferenceMatrix(P=values, hypotheses=[], sigma=1.0, active=np.ones(values.shape[1], dtype=bool))


def _line_points(n=100):
    t = np.linspace(0.0, 1.0, n)
    return np.column_stack([t, 0.5 * t + 0.25])


def test_pool_is_deterministic_and_valid():
    rng = np.random.default_rng(0)
    X = rng.uniform(size=(50, 2))
    first = sample_pool(X, LINE, 40, seed=7)
    second = sample_pool(X, LINE, 40, seed=7)
    assert [h.sample_indices for h in first] == [h.sample_indices for h in second]
    assert all(np.array_equal(a.params.theta, b.params.theta) for a, b in zip(first, second))
    for h in first:
        assert len(h.sample_indices) == 2 and len(set(h.sample_indices)) == 2

    other = sample_pool(X, LINE, 40, seed=8)
    assert [h.sample_indices for h in other] != [h.sample_indices for h in first]


def test_pool_prefix_does_not_depend_on_pool_size():
    X = np.random.default_rng(1).uniform(size=(30, 2))
    short = sample_pool(X, LINE, 10, seed=3)
    long = sample_pool(X, LINE, 25, seed=3)
    assert [h.sample_indices for h in short] == [h.sample_indices for h in long[:10]]


def test_pool_when_m_equals_b():
    X = np.array([[0.0, 0.0], [1.0, 2.0]])
    pool = sample_pool(X, LINE, 5, seed=0)
    assert all(h.sample_indices == (0, 1) for h in pool)
    assert all(np.allclose(h.params.theta, pool[0].params.theta) for h in pool)


def test_line_pool_on_clean_line_finds_the_line():
    X = _line_points(100)
    pool = sample_pool(X, LINE, 500, seed=0)
    best = max(int(np.count_nonzero(LINE.residuals(h.params.theta, X) < 1e-9)) for h in pool)
    assert best >= 99


def test_pool_redraws_degenerate_samples():
    X = np.vstack([np.zeros((5, 2)), [[1.0, 1.0]]])
    pool = sample_pool(X, LINE, 20, seed=1)
    assert len(pool) == 20
    assert all(5 in h.sample_indices for h in pool)


def test_pool_exhausted_on_degenerate_data():
    X = np.ones((10, 2))
    with pytest.raises(PoolExhausted):
        sample_pool(X, LINE, 3, seed=0)


def test_pool_rejects_bad_sizes_and_seeds():
    with pytest.raises(InvalidParams):
        sample_pool(np.zeros((2, 2)), Circle2D(), 5, seed=0)
    with pytest.raises(InvalidParams):
        sample_pool(np.random.default_rng(0).uniform(size=(5, 2)), LINE, 0, seed=0)
    with pytest.raises(InvalidParams):
        sample_pool(np.random.default_rng(0).uniform(size=(5, 2)), LINE, 3, seed=-1)


def test_build_preference_matches_scalar_oracle():
    X = np.array([[0.0, 0.0], [1.0, 0.05], [2.0, -0.1], [0.0, 1.0], [5.0, 5.0]])
    pool = [
        Hypothesis(params=LINE.params([0.0, 1.0, 0.0]), sample_indices=(0, 1)),
        Hypothesis(params=LINE.params([1.0, 0.0, 0.0]), sample_indices=(0, 3))
    ]
    sigma = 0.1
    P = build_preference(X, pool, sigma)

    expected = np.zeros((5, 2))
    for i, x in enumerate(X):
        for j, h in enumerate(pool):
            d = abs(h.params.theta[:2] @ x + h.params.theta[2])
            expected[i, j] = np.exp(-d * d / (2 * sigma * sigma)) if d <= 3 * sigma else 0.0
    assert np.allclose(P.P, expected, atol=1e-15)
    assert P.P[0, 0] == 1.0 and P.P[0, 1] == 1.0
    assert not P.P[4].any()
    assert P.active.all() and P.n_active == 2


def test_build_preference_on_sampled_pool():
    rng = np.random.default_rng(2)
    X = np.vstack([_line_points(40), rng.uniform(size=(20, 2))])
    pool = sample_pool(X, LINE, 60, seed=4)
    P = build_preference(X, pool, 0.01)
    assert P.P.min() >= 0.0 and P.P.max() <= 1.0
    for j, h in enumerate(pool):
        # The defining sample has zero residual
        assert np.all(P.P[list(h.sample_indices), j] == pytest.approx(1.0))


def test_build_preference_rejects_bad_input():
    pool = [Hypothesis(params=LINE.params([0.0, 1.0, 0.0]), sample_indices=(0, 1))]
    with pytest.raises(InvalidParams):
        build_preference(np.zeros((3, 2)), pool, 0.0)
    with pytest.raises(InvalidParams):
        build_preference(np.zeros((3, 2)), [], 0.1)


def test_consensus_init_single_column():
    P = _matrix([[0.0, 0.5, 0.0], [0.0, 0.25, 0.0], [0.0, 0.0, 0.0]])
    u0, v0 = consensus_init(P)
    assert np.allclose(u0, [1.0, 0.5, 0.0])
    assert v0[1] == pytest.approx(0.25)
    assert u0.max() == 1.0
    assert np.flatnonzero(v0).tolist() == [1]


def test_largest_column_argmax_and_ties():
    assert largest_column(_matrix([[3.0, 1.0], [2.0, 2.0]])) == 0
    assert largest_column(_matrix([[1.0, 2.0, 0.5], [1.0, 0.0, 1.5]])) == 0
    tied = _matrix([[0.0, 1.0, 1.0], [0.0, 1.0, 1.0]])
    assert largest_column(tied) == 1

    P = _matrix([[3.0, 1.0], [2.0, 2.0]])
    P = deflate_columns(P, [1.0, 0.0])
    assert largest_column(P) == 1


def test_consensus_init_feasible_on_rank_one_support():
    c = np.array([1.0, 0.5, 0.8, 0.0])
    P = _matrix(np.column_stack([c, 0.5 * c, np.zeros(4)]))
    u0, v0 = consensus_init(P)
    j = largest_column(P)
    assert np.all(P.P[:, j] >= u0 * v0[j] - 1e-9)
    assert (v0 >= 0).all()


def test_consensus_init_empty():
    with pytest.raises(EmptyPreference):
        consensus_init(_matrix(np.zeros((3, 2))))
    P = deflate_columns(_matrix([[1.0, 0.0], [1.0, 0.0]]), [1.0, 0.0])
    with pytest.raises(EmptyPreference):
        consensus_init(P)


def test_deflate_columns_examples():
    values = np.arange(1.0, 19.0).reshape(3, 6)
    P = _matrix(values)

    assert deflate_columns(P, np.zeros(6)) is P

    gone = deflate_columns(P, np.ones(6))
    assert not gone.P.any() and gone.n_active == 0

    v = np.zeros(6)
    v[[2, 5]] = [0.3, 1.0]
    out = deflate_columns(P, v)
    assert not out.P[:, [2, 5]].any()
    keep = [0, 1, 3, 4]
    assert np.array_equal(out.P[:, keep].sum(axis=0), values[:, keep].sum(axis=0))
    assert out.active.tolist() == [True, True, False, True, True, False]
    assert np.array_equal(P.P, values)  # Input untouched


def test_deflate_columns_load_floor_and_idempotence():
    P = _matrix(np.ones((2, 3)))
    out = deflate_columns(P, [1.0, 1e-12, 0.5])
    assert out.active.tolist() == [False, True, False]
    again = deflate_columns(out, [1.0, 1e-12, 0.5])
    assert np.array_equal(again.P, out.P)
    assert np.array_equal(again.active, out.active)

    with pytest.raises(InvalidParams):
        deflate_columns(P, [1.0, 0.0])


def test_write_preference_csv_keeps_active_columns(tmp_path):
    P = deflate_columns(_matrix([[0.1, 0.2, 0.3], [0.4, 0.5, 0.6]]), [0.0, 1.0, 0.0])
    path = write_preference_csv(tmp_path / 'p.csv', P)
    assert np.array_equal(read_matrix_csv(path), active_submatrix(P))
    assert read_matrix_csv(path).shape == (2, 2)
