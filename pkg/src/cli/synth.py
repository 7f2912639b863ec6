"""
Synthetic labeled datasets for the model families

2-D kinds live in the unit square with uniform outliers; two-view kinds are
correspondences inside a 640 × 480 image with uniform gross mismatches.
Label 0 marks an outlier, label t ≥ 1 the t-th generating model.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from ..config import IMAGE_SIZE, SYNTH_DEFAULTS
from ..errors import InvalidParams
from ..geometry import get_family, rank_two
from ..geometry.projective import canonical_matrix
from ..models import ModelParams

logger = logging.getLogger('synth')


@dataclass
class Dataset:
    family: str
    points: np.ndarray
    labels: Optional[np.ndarray] = None
    models: List[ModelParams] = field(default_factory=list)  # Generating models, if known
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def to_dict(self) -> dict:
        out = {
            'family': self.family,
            'points': [[float(c) for c in p] for p in self.points]
        }
        if self.labels is not None:
            out['labels'] = [int(label) for label in self.labels]
        if self.models:
            out['models'] = [p.to_dict() for p in self.models]
        if self.meta:
            out['meta'] = self.meta
        return out


def write_dataset(path: Union[str, Path], dataset: Dataset) -> Path:
    path = Path(path)
    with open(path, 'w') as f:
        json.dump(dataset.to_dict(), f, indent=1)
    return path


def load_dataset(path: Union[str, Path]) -> Dataset:
    """Read and validate a dataset JSON file"""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Dataset not found: {path}")
    try:
        with open(path) as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidParams(f"{path} is not valid JSON: {e}") from None
    if not isinstance(raw, dict) or 'family' not in raw or 'points' not in raw:
        raise InvalidParams(f"{path} needs 'family' and 'points'")

    family = get_family(raw['family'])
    points = family.validate_data(raw['points'])
    labels = None
    if raw.get('labels') is not None:
        labels = np.asarray(raw['labels'], dtype=int)
        if labels.shape != (points.shape[0],):
            raise InvalidParams(f"{len(labels)} labels for {points.shape[0]} points")
        if np.any(labels < 0):
            raise InvalidParams("Labels must be nonnegative (0 = outlier)")
    models = [family.params(m['theta']) for m in raw.get('models', [])]
    return Dataset(family=family.name, points=points, labels=labels, models=models, meta=raw.get('meta', {}))


def _split_counts(n_points: int, k: int, outlier_ratio: float) -> Tuple[List[int], int]:
    n_out = int(round(outlier_ratio * n_points))
    n_in = n_points - n_out
    base, extra = divmod(n_in, k)
    return [base + (1 if t < extra else 0) for t in range(k)], n_out


def _assemble(rng: np.random.Generator, groups: List[np.ndarray], outliers: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Stack groups and outliers, then shuffle so order carries no label information"""
    parts = groups + [outliers]
    labels = np.concatenate([np.full(len(g), t + 1) for t, g in enumerate(groups)] + [np.zeros(len(outliers), dtype=int)])
    points = np.vstack([p.reshape(-1, groups[0].shape[1]) for p in parts])
    order = rng.permutation(len(points))
    return points[order], labels[order].astype(int)


def _line(normal: np.ndarray, through: np.ndarray) -> np.ndarray:
    return np.array([normal[0], normal[1], -float(normal @ through)])


def generate_star(rng, k, n_points, noise, outlier_ratio):
    """k lines through the center of the unit square"""
    family = get_family('line2d')
    counts, n_out = _split_counts(n_points, k, outlier_ratio)
    center = np.array([0.5, 0.5])
    offset = rng.uniform(0.0, np.pi / k)
    groups, models = [], []
    for t, count in enumerate(counts):
        angle = offset + np.pi * t / k
        direction = np.array([np.cos(angle), np.sin(angle)])
        s = rng.uniform(-0.45, 0.45, count)
        pts = center + s[:, None] * direction + rng.normal(0.0, noise, (count, 2))
        groups.append(pts)
        models.append(family.params(_line(np.array([-direction[1], direction[0]]), center)))
    return groups, rng.uniform(0.0, 1.0, (n_out, 2)), models


def generate_stairs(rng, k, n_points, noise, outlier_ratio):
    """k parallel horizontal treads, each shifted right of the one below"""
    family = get_family('line2d')
    counts, n_out = _split_counts(n_points, k, outlier_ratio)
    groups, models = [], []
    width = 0.8 / (k + 1)
    for t, count in enumerate(counts):
        y = 0.1 + 0.8 * (t + 0.5) / k
        x = rng.uniform(0.1 + t * width, 0.1 + (t + 1) * width + width, count)
        pts = np.column_stack([x, np.full(count, y)]) + rng.normal(0.0, noise, (count, 2))
        groups.append(pts)
        models.append(family.params(np.array([0.0, 1.0, -y])))
    return groups, rng.uniform(0.0, 1.0, (n_out, 2)), models


def generate_circles(rng, k, n_points, noise, outlier_ratio):
    """k circles with centers on a ring; neighbours on the ring intersect"""
    family = get_family('circle2d')
    counts, n_out = _split_counts(n_points, k, outlier_ratio)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    ring = 0.25 if k > 1 else 0.0
    groups, models = [], []
    for t, count in enumerate(counts):
        phi = phase + 2.0 * np.pi * t / k
        center = np.array([0.5 + ring * np.cos(phi), 0.5 + ring * np.sin(phi)])
        radius = rng.uniform(0.15, 0.2)
        angles = rng.uniform(0.0, 2.0 * np.pi, count)
        pts = center + radius * np.column_stack([np.cos(angles), np.sin(angles)])
        groups.append(pts + rng.normal(0.0, noise, (count, 2)))
        models.append(family.params([center[0], center[1], radius]))
    return groups, rng.uniform(0.0, 1.0, (n_out, 2)), models


def _image_points(rng, count):
    width, height = IMAGE_SIZE
    return np.column_stack([rng.uniform(0.0, width, count), rng.uniform(0.0, height, count)])


def _project(M: np.ndarray, points: np.ndarray) -> np.ndarray:
    h = np.column_stack([points, np.ones(len(points))]) @ M.T
    return h[:, :2] / h[:, 2:3]


def generate_homography(rng, k, n_points, noise, outlier_ratio):
    """k planes, each moving by its own homography; translations 60 px apart"""
    family = get_family('homography')
    counts, n_out = _split_counts(n_points, k, outlier_ratio)
    groups, models = [], []
    for t, count in enumerate(counts):
        angle = rng.uniform(-0.02, 0.02)
        scale = rng.uniform(0.99, 1.01)
        H = np.array([
            [scale * np.cos(angle), -scale * np.sin(angle), 60.0 * (t - (k - 1) / 2.0) + rng.uniform(-5, 5)],
            [scale * np.sin(angle), scale * np.cos(angle), rng.uniform(-20.0, 20.0)],
            [rng.uniform(-2e-5, 2e-5), rng.uniform(-2e-5, 2e-5), 1.0]
        ])
        x = _image_points(rng, count)
        xp = _project(H, x)
        pts = np.column_stack([x + rng.normal(0.0, noise, x.shape), xp + rng.normal(0.0, noise, xp.shape)])
        groups.append(pts)
        models.append(family.params(canonical_matrix(H).ravel()))
    outliers = np.column_stack([_image_points(rng, n_out), _image_points(rng, n_out)])
    return groups, outliers, models


def _skew(t: np.ndarray) -> np.ndarray:
    return np.array([[0.0, -t[2], t[1]], [t[2], 0.0, -t[0]], [-t[1], t[0], 0.0]])


def _rotation(rng, max_angle: float) -> np.ndarray:
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(-max_angle, max_angle)
    K = _skew(axis)
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * K @ K


def generate_fundamental(rng, k, n_points, noise, outlier_ratio):
    """k rigid objects seen by a fixed camera before and after independent motions"""
    family = get_family('fundamental')
    counts, n_out = _split_counts(n_points, k, outlier_ratio)
    width, height = IMAGE_SIZE
    K = np.array([[500.0, 0.0, width / 2], [0.0, 500.0, height / 2], [0.0, 0.0, 1.0]])
    K_inv = np.linalg.inv(K)
    groups, models = [], []
    for t, count in enumerate(counts):
        R = _rotation(rng, 0.15)
        shift = rng.normal(0.0, 1.0, 3)
        shift[:2] += [0.8 * (t - (k - 1) / 2.0), 0.0]
        center = np.array([rng.uniform(-1.0, 1.0), rng.uniform(-0.7, 0.7), rng.uniform(5.0, 7.0)])
        X = center + rng.uniform(-1.0, 1.0, (count, 3))
        x = (X @ K.T)
        x = x[:, :2] / x[:, 2:3]
        Y = X @ R.T + shift
        xp = Y @ K.T
        xp = xp[:, :2] / xp[:, 2:3]
        pts = np.column_stack([x + rng.normal(0.0, noise, x.shape), xp + rng.normal(0.0, noise, xp.shape)])
        groups.append(pts)
        F = K_inv.T @ _skew(shift) @ R @ K_inv
        models.append(family.params(canonical_matrix(rank_two(F)).ravel()))
    outliers = np.column_stack([_image_points(rng, n_out), _image_points(rng, n_out)])
    return groups, outliers, models


GENERATORS: Dict[str, Tuple[str, Callable]] = {
    'star': ('line2d', generate_star),
    'stairs': ('line2d', generate_stairs),
    'circles': ('circle2d', generate_circles),
    'homography': ('homography', generate_homography),
    'fundamental': ('fundamental', generate_fundamental)
}


def synthesize(
    kind: str,
    seed: int = 0,
    k: Optional[int] = None,
    n_points: Optional[int] = None,
    noise: Optional[float] = None,
    outlier_ratio: Optional[float] = None
) -> Dataset:
    """Labeled dataset of the given kind; unspecified parameters take the kind's defaults"""
    if kind not in GENERATORS:
        raise InvalidParams(f"Unknown dataset kind '{kind}', expected one of {sorted(GENERATORS)}")
    defaults = SYNTH_DEFAULTS[kind]
    k = defaults['k'] if k is None else int(k)
    n_points = defaults['n_points'] if n_points is None else int(n_points)
    noise = defaults['noise'] if noise is None else float(noise)
    outlier_ratio = defaults['outlier_ratio'] if outlier_ratio is None else float(outlier_ratio)

    family_name, generator = GENERATORS[kind]
    b = get_family(family_name).b
    if k < 1:
        raise InvalidParams(f"k must be at least 1, got {k}")
    if not noise >= 0:
        raise InvalidParams(f"noise must be nonnegative, got {noise}")
    if not 0 <= outlier_ratio < 1:
        raise InvalidParams(f"outlier_ratio must be in [0, 1), got {outlier_ratio}")
    counts, _ = _split_counts(n_points, k, outlier_ratio)
    if min(counts) < b:
        raise InvalidParams(f"{n_points} points leave fewer than {b} inliers for some of the {k} models")

    if seed < 0:
        raise InvalidParams(f"seed must be nonnegative, got {seed}")
    rng = np.random.default_rng(seed)
    groups, outliers, models = generator(rng, k, n_points, noise, outlier_ratio)
    points, labels = _assemble(rng, groups, outliers)
    logger.info(f"Generated {kind}: {k} models, {len(points)} points, {int(np.sum(labels == 0))} outliers")
    return Dataset(
        family=family_name,
        points=points,
        labels=labels,
        models=models,
        meta={'kind': kind, 'seed': seed, 'k': k, 'noise': noise, 'outlier_ratio': outlier_ratio}
    )
