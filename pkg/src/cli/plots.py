"""
Static figures for the reports
Agg backend, fixed SVG hash salt and no date metadata so that reruns give
byte-identical files.
"""
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..config import PLOT_SETTINGS  # noqa: E402
from ..models import ModelParams  # noqa: E402

logger = logging.getLogger('plots')

plt.rcParams['svg.hashsalt'] = PLOT_SETTINGS['hashsalt']


def _save(fig, path: Union[str, Path]) -> Path:
    path = Path(path)
    metadata = {'Date': None} if path.suffix == '.svg' else {'Software': None}
    fig.savefig(path, metadata=metadata, dpi=PLOT_SETTINGS['dpi'])
    plt.close(fig)
    logger.debug(f"Wrote {path}")
    return path


def _figure():
    return plt.subplots(figsize=PLOT_SETTINGS['figsize'])


def plot_convergence(histories: Sequence[Sequence[float]], path: Union[str, Path]) -> Path:
    """‖R‖F/‖A‖F against iteration, one curve per factor"""
    fig, ax = _figure()
    for t, history in enumerate(histories):
        if len(history):
            ax.semilogy(np.arange(1, len(history) + 1), np.maximum(history, 1e-16), label=f"factor {t + 1}")
    ax.set_xlabel('iteration')
    ax.set_ylabel('relative residual')
    if histories:
        ax.legend(loc='upper right')
    return _save(fig, path)


def plot_residual_histogram(
    values: np.ndarray,
    path: Union[str, Path],
    baseline: Optional[np.ndarray] = None
) -> Path:
    """Entries of the final residual; the optional baseline is the SVD-deflation residual"""
    fig, ax = _figure()
    bins = PLOT_SETTINGS['histogram_bins']
    all_values = np.concatenate([np.ravel(values)] + ([np.ravel(baseline)] if baseline is not None else []))
    edges = np.histogram_bin_edges(all_values, bins=bins)
    ax.hist(np.ravel(values), bins=edges, alpha=0.7, label='NMU')
    if baseline is not None:
        ax.hist(np.ravel(baseline), bins=edges, alpha=0.5, label='SVD')
        ax.legend(loc='upper right')
    ax.axvline(0.0, color='black', linewidth=0.8)
    ax.set_xlabel('residual entry')
    ax.set_ylabel('count')
    return _save(fig, path)


def _draw_model(ax, params: ModelParams, color):
    theta = params.theta
    if params.family.name == 'line2d':
        n, c = theta[:2], theta[2]
        if abs(n[1]) >= abs(n[0]):
            xs = np.array([0.0, 1.0])
            ys = -(n[0] * xs + c) / n[1]
        else:
            ys = np.array([0.0, 1.0])
            xs = -(n[1] * ys + c) / n[0]
        ax.plot(xs, ys, color=color, linewidth=1.0)
    elif params.family.name == 'circle2d':
        angles = np.linspace(0.0, 2.0 * np.pi, 200)
        ax.plot(theta[0] + theta[2] * np.cos(angles), theta[1] + theta[2] * np.sin(angles), color=color, linewidth=1.0)


def plot_scatter(
    points: np.ndarray,
    labels: Sequence[int],
    models: List[ModelParams],
    path: Union[str, Path]
) -> Path:
    """Data colored by label (outliers grey) with the fitted 2-D models drawn over them"""
    fig, ax = _figure()
    cmap = plt.get_cmap(PLOT_SETTINGS['colormap'])
    labels = np.asarray(labels, dtype=int)
    outliers = labels == 0
    ax.scatter(points[outliers, 0], points[outliers, 1], s=4, color='0.7')
    for t, params in enumerate(models, start=1):
        color = cmap((t - 1) % cmap.N)
        mask = labels == t
        ax.scatter(points[mask, 0], points[mask, 1], s=6, color=color)
        _draw_model(ax, params, color)
    ax.set_xlim(-0.05, 1.05)
    ax.set_ylim(-0.05, 1.05)
    ax.set_aspect('equal')
    return _save(fig, path)


def plot_preference(P: np.ndarray, path: Union[str, Path], title: str = '') -> Path:
    fig, ax = _figure()
    ax.imshow(P, aspect='auto', interpolation='nearest', cmap='gray_r', vmin=0.0, vmax=1.0)
    ax.set_xlabel('hypotheses')
    ax.set_ylabel('data')
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_sweep(sigmas: Sequence[float], counts: Sequence[Optional[int]], errors: Sequence[Optional[float]], path: Union[str, Path]) -> Path:
    """Model count (and misclassification when known) against σ"""
    fig, ax = _figure()
    ax.plot(sigmas, [np.nan if c is None else c for c in counts], marker='o', label='models')
    ax.set_xlabel('sigma')
    ax.set_ylabel('models')
    if any(e is not None for e in errors):
        twin = ax.twinx()
        twin.plot(sigmas, [np.nan if e is None else e for e in errors], marker='s', color='tab:red', label='misclassification')
        twin.set_ylabel('misclassification')
        twin.set_ylim(0.0, 1.0)
    return _save(fig, path)
