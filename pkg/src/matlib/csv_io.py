"""
CSV matrix format: rows of comma-separated decimals, no header
"""
import csv
import logging
from pathlib import Path
from typing import List, Union

import numpy as np

from ..errors import MatrixFormatError

logger = logging.getLogger('matlib')


def read_matrix_csv(path: Union[str, Path]) -> np.ndarray:
    """Read a dense matrix; ragged rows and non-numeric cells are rejected with their line"""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Matrix file not found: {path}")

    rows: List[List[float]] = []
    width = None
    with open(path, 'r', newline='') as f:
        for line_no, row in enumerate(csv.reader(f), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue  # Blank lines are allowed
            try:
                values = [float(cell) for cell in row]
            except ValueError as e:
                raise MatrixFormatError(f"not a decimal literal ({e})", line=line_no)
            if not all(np.isfinite(values)):
                raise MatrixFormatError("NaN or infinite entry", line=line_no)
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise MatrixFormatError(
                    f"ragged row: {len(values)} columns, expected {width}", line=line_no
                )
            rows.append(values)

    if not rows:
        raise MatrixFormatError(f"no data rows in {path}")
    logger.debug(f"Read {len(rows)}x{width} matrix from {path}")
    return np.array(rows, dtype=float)


def write_matrix_csv(path: Union[str, Path], A: np.ndarray):
    """Write with round-trip precision"""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        for row in A:
            writer.writerow([repr(float(a)) for a in row])
