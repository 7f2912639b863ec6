import sys
import logging
from pathlib import Path

import numpy as np
import pytest

# Add the project root to the Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.errors import InvalidParams, MatrixFormatError, NegativeEntry, NoConvergence, ZeroMatrix
from src.matlib import (
    as_matrix, frobenius_norm, inf_norm, outer, dot, matvec, vecmat,
    project_nonneg, rank_one_svd, read_matrix_csv, require_nonnegative, write_matrix_csv
)

logger = logging.getLogger('test')


def test_project_nonneg_examples():
    B = np.array([[-1.0, 2.0], [0.5, -3.0]])
    assert np.array_equal(project_nonneg(B), [[0.0, 2.0], [0.5, 0.0]])
    assert np.array_equal(B, [[-1.0, 2.0], [0.5, -3.0]])  # Input untouched

    C = np.array([[1.0, 0.0], [2.5, 4.0]])
    assert np.array_equal(project_nonneg(C), C)
    assert np.array_equal(project_nonneg(-np.ones((2, 3))), np.zeros((2, 3)))


def test_project_nonneg_is_idempotent_euclidean_projection():
    rng = np.random.default_rng(3)
    for _ in range(20):
        B = rng.normal(size=(4, 5))
        P = project_nonneg(B)
        assert np.array_equal(project_nonneg(P), P)
        best = frobenius_norm(B - P)
        for _ in range(10):
            C = np.abs(rng.normal(size=B.shape)) * rng.integers(0, 2, size=B.shape)
            assert best <= frobenius_norm(B - C) + 1e-15


def test_norms_and_products():
    assert frobenius_norm(np.array([[3.0, 4.0]])) == pytest.approx(5.0)
    assert inf_norm(np.array([-2.0, 1.0])) == 2.0
    assert np.array_equal(outer(np.array([1.0, 2.0]), np.array([3.0, 4.0])), [[3, 4], [6, 8]])
    assert dot(np.array([1.0, 2.0]), np.array([3.0, 4.0])) == 11.0
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(matvec(A, np.array([1.0, 1.0])), [3.0, 7.0])
    assert np.array_equal(vecmat(np.array([1.0, 1.0]), A), [4.0, 6.0])


def test_as_matrix_rejects_bad_input():
    with pytest.raises(InvalidParams):
        as_matrix([1.0, 2.0])
    with pytest.raises(InvalidParams):
        as_matrix(np.zeros((0, 3)))
    with pytest.raises(InvalidParams):
        as_matrix([[1.0, np.nan]])


def test_require_nonnegative_reports_first_negative_entry():
    require_nonnegative(np.zeros((2, 2)))
    with pytest.raises(NegativeEntry) as excinfo:
        require_nonnegative(np.array([[1.0, 0.0], [-0.5, -2.0]]))
    assert (excinfo.value.row, excinfo.value.col) == (1, 0)
    assert excinfo.value.value == -0.5


def test_rank_one_svd_diagonal():
    svd = rank_one_svd(np.array([[2.0, 0.0], [0.0, 1.0]]))
    assert svd.s == pytest.approx(2.0, abs=1e-10)
    assert np.allclose(svd.x, [1.0, 0.0], atol=1e-8)
    assert np.allclose(svd.y, [1.0, 0.0], atol=1e-8)


def test_rank_one_svd_exact_outer_product():
    a = np.array([1.0, 2.0])
    b = np.array([3.0, 1.0])
    svd = rank_one_svd(np.outer(a, b))
    assert svd.s == pytest.approx(np.sqrt(5.0) * np.sqrt(10.0), rel=1e-12)
    assert np.allclose(svd.x, a / np.linalg.norm(a), atol=1e-12)
    assert np.allclose(svd.y, b / np.linalg.norm(b), atol=1e-12)


def test_rank_one_svd_matches_dense_eigensolver():
    rng = np.random.default_rng(11)
    A = rng.uniform(size=(8, 6))
    svd = rank_one_svd(A)

    eigenvalues, eigenvectors = np.linalg.eigh(A.T @ A)
    y = eigenvectors[:, -1]
    x = A @ y / np.linalg.norm(A @ y)
    if x[np.argmax(np.abs(x))] < 0:
        x, y = -x, -y
    assert svd.s == pytest.approx(np.sqrt(eigenvalues[-1]), rel=1e-8)
    assert np.allclose(svd.x, x, atol=1e-8)
    assert np.allclose(svd.y, y, atol=1e-8)
    assert np.linalg.norm(svd.x) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(svd.y) == pytest.approx(1.0, abs=1e-12)


def test_rank_one_svd_wide_matrix_uses_left_gram():
    rng = np.random.default_rng(5)
    A = rng.uniform(size=(3, 9))
    svd = rank_one_svd(A)
    assert svd.s == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-9)


def test_rank_one_svd_residual_optimality():
    rng = np.random.default_rng(7)
    for _ in range(20):
        A = rng.normal(size=(6, 5))
        svd = rank_one_svd(A)
        residual = A - svd.s * np.outer(svd.x, svd.y)
        assert frobenius_norm(residual) ** 2 == pytest.approx(
            frobenius_norm(A) ** 2 - svd.s ** 2, abs=1e-8
        )


def test_rank_one_svd_perron_frobenius_sign():
    rng = np.random.default_rng(13)
    for _ in range(100):
        rows, cols = rng.integers(2, 12, size=2)
        A = rng.uniform(size=(rows, cols)) ** 3
        svd = rank_one_svd(A)
        assert svd.x.min() >= -1e-10
        assert svd.y.min() >= -1e-10


def test_rank_one_svd_errors():
    with pytest.raises(ZeroMatrix):
        rank_one_svd(np.zeros((3, 2)))
    with pytest.raises(InvalidParams):
        rank_one_svd(np.eye(2), tol=0.0)

    with pytest.raises(NoConvergence) as excinfo:
        rank_one_svd(np.diag([1.0, 0.999]), max_iters=1)
    last = excinfo.value.result
    assert last is not None and not last.converged
    assert np.linalg.norm(last.x) == pytest.approx(1.0)


def test_csv_round_trip(tmp_path):
    A = np.array([[0.1, 2.0, 3.5e-17], [1.0 / 3.0, 0.0, 7.0]])
    path = tmp_path / 'a.csv'
    write_matrix_csv(path, A)
    assert np.array_equal(read_matrix_csv(path), A)


def test_csv_reader_errors(tmp_path):
    ragged = tmp_path / 'ragged.csv'
    ragged.write_text('1,2,3\n4,5\n')
    with pytest.raises(MatrixFormatError) as excinfo:
        read_matrix_csv(ragged)
    assert excinfo.value.line == 2

    text = tmp_path / 'text.csv'
    text.write_text('1,2\n3,x\n')
    with pytest.raises(MatrixFormatError) as excinfo:
        read_matrix_csv(text)
    assert excinfo.value.line == 2

    empty = tmp_path / 'empty.csv'
    empty.write_text('\n\n')
    with pytest.raises(MatrixFormatError):
        read_matrix_csv(empty)

    with pytest.raises(FileNotFoundError):
        read_matrix_csv(tmp_path / 'missing.csv')


def test_csv_skips_blank_lines(tmp_path):
    path = tmp_path / 'blank.csv'
    path.write_text('1,2\n\n3,4\n')
    assert np.array_equal(read_matrix_csv(path), [[1.0, 2.0], [3.0, 4.0]])
