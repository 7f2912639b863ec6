"""
Subcommand implementations: nmu, synth, fit, sweep, report
Machine output goes to files under the output directory and to stdout.
"""
import asyncio
import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np

from ..config import LOAD_FLOOR_REL
from ..errors import InvalidParams, UnderfitError
from ..events import event_bell
from ..geometry import get_family
from ..matlib import frobenius_norm, read_matrix_csv, write_matrix_csv
from ..models import FitResult
from ..nmu import extract_factors, factor_energy, svd_deflation, write_factors
from ..preference import write_preference_csv
from ..robustfit import fit_models, labels_from_memberships, labels_from_models, misclassification_error
from .plots import plot_convergence, plot_preference, plot_residual_histogram, plot_scatter, plot_sweep
from .runconfig import RunConfig
from .synth import Dataset, load_dataset, synthesize, write_dataset

logger = logging.getLogger('cli')


def _write_json(path: Path, payload: Dict[str, Any]) -> Path:
    with open(path, 'w') as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write('\n')
    return path


def cmd_nmu(config: RunConfig) -> Dict[str, Any]:
    """Multi-factor NMU of a CSV matrix with factor files, report and figures"""
    A = read_matrix_csv(config.input)
    factors = extract_factors(A, config.rank, config.nmu_config())

    # Subtracted in deflation order
    residual = A.copy()
    for factor in factors:
        residual = residual - factor.outer()
    norm_a = frobenius_norm(A)
    summary = {
        'shape': list(A.shape),
        'factors': len(factors),
        'relative_error': frobenius_norm(residual) / norm_a,
        'negative_entries': int(np.count_nonzero(residual < 0)),
        'min_residual': float(residual.min()),
        'energy': factor_energy(A, factors)
    }

    baseline = None
    if config.compare_svd:
        steps = svd_deflation(A, config.rank)
        summary['svd_negative_entries'] = [s['negative_entries'] for s in steps]
        baseline = steps[-1]['residual'] if steps else None

    out = config.output_dir
    write_factors(out, factors, extra={'summary': summary})
    plot_convergence([f.history_against(norm_a) for f in factors], out / 'convergence.svg')
    plot_residual_histogram(residual, out / 'residual_histogram.svg', baseline)

    print(f"factors: {len(factors)}")
    print(f"relative reconstruction error: {summary['relative_error']:.3e}")
    print(f"negative residual entries: {summary['negative_entries']} (min {summary['min_residual']:.3e})")
    for t, share in enumerate(summary['energy']['factors'], start=1):
        print(f"energy factor {t}: {share:.2%}")
    print(f"energy residual: {summary['energy']['residual']:.2%}")
    if config.compare_svd:
        print(f"SVD deflation negative entries per step: {summary['svd_negative_entries']}")
    return summary


def cmd_synth(config: RunConfig) -> Path:
    dataset = synthesize(
        config.kind, seed=config.seed, k=config.k, n_points=config.n_points,
        noise=config.noise, outlier_ratio=config.outlier_ratio
    )
    path = write_dataset(config.output_dir / 'dataset.json', dataset)
    print(path)
    return path


def _predicted_labels(result: FitResult) -> np.ndarray:
    if result.assignment is not None:
        return np.asarray(result.assignment, dtype=int)
    return labels_from_memberships(result.memberships)


def run_fit(config: RunConfig, dataset: Dataset, sigma: float) -> Tuple[FitResult, Dict[str, Any]]:
    """Pipeline plus scores; touches no file"""
    family = get_family(config.family or dataset.family)
    if family.name != dataset.family:
        raise InvalidParams(f"Dataset holds {dataset.family} data, requested {family.name}")

    fit_config = config.fit_config(sigma)
    result = fit_models(dataset.points, family, fit_config)
    row: Dict[str, Any] = {
        'sigma': float(sigma),
        'models': len(result.selected),
        'misclassification': None,
        'oracle_misclassification': None,
        'status': 'ok'
    }
    if dataset.has_labels:
        row['misclassification'] = misclassification_error(_predicted_labels(result), dataset.labels)
        if dataset.models:
            oracle = labels_from_models(dataset.models, dataset.points, sigma)
            row['oracle_misclassification'] = misclassification_error(oracle, dataset.labels)
    return result, row


def _bicluster_columns(result: FitResult) -> List[List[int]]:
    """Per candidate, positions (in the active-column dump) of the columns it loaded"""
    P = result.preference
    position = -np.ones(P.shape[1], dtype=int)
    position[P.active] = np.arange(P.n_active)
    groups = []
    for candidate in result.all_candidates:
        v = candidate.v_hat
        top = float(v.max()) if v.size else 0.0
        loaded = np.flatnonzero(v > LOAD_FLOOR_REL * top) if top > 0 else np.array([], dtype=int)
        groups.append([int(position[j]) for j in loaded if position[j] >= 0])
    return groups


def cmd_fit(config: RunConfig) -> Dict[str, Any]:
    dataset = load_dataset(config.input)
    result, row = run_fit(config, dataset, config.sigma)
    out = config.output_dir

    payload = result.to_dict()
    payload['misclassification'] = row['misclassification']
    payload['oracle_misclassification'] = row['oracle_misclassification']
    payload['config'] = config.to_dict()
    payload['bicluster_columns'] = _bicluster_columns(result)
    _write_json(out / 'result.json', payload)
    m = len(dataset.points)
    write_matrix_csv(out / 'memberships.csv', result.memberships if result.selected else np.zeros((m, 1)))
    write_preference_csv(out / 'preference.csv', result.preference)

    if get_family(dataset.family).datum_dim == 2:
        plot_scatter(
            dataset.points,
            _predicted_labels(result),
            [b.theta_hat for b in result.selected],
            out / 'overlay.svg'
        )

    print(f"models: {row['models']}")
    if row['misclassification'] is not None:
        print(f"misclassification: {row['misclassification']:.4f}")
    if row['oracle_misclassification'] is not None:
        print(f"ground-truth models misclassification: {row['oracle_misclassification']:.4f}")
    return row


async def cmd_sweep(config: RunConfig) -> List[Dict[str, Any]]:
    """One pipeline per σ, run concurrently; failures become rows and the sweep goes on"""
    dataset = load_dataset(config.input)

    def one(sigma: float) -> Dict[str, Any]:
        try:
            _, row = run_fit(config, dataset, sigma)
        except UnderfitError as e:
            logger.error(f"σ={sigma} failed: {e}")
            row = {
                'sigma': float(sigma), 'models': None, 'misclassification': None,
                'oracle_misclassification': None, 'status': f"error: {e}"
            }
        event_bell.publish('sweep_row', row)
        return row

    rows = await asyncio.gather(*(asyncio.to_thread(one, s) for s in config.sigmas))

    out = config.output_dir
    columns = ['sigma', 'models', 'misclassification', 'oracle_misclassification', 'status']
    with open(out / 'sweep.csv', 'w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({k: '' if row[k] is None else row[k] for k in columns})
    plot_sweep(
        [r['sigma'] for r in rows],
        [r['models'] for r in rows],
        [r['misclassification'] for r in rows],
        out / 'sweep.svg'
    )
    for row in rows:
        error = '' if row['misclassification'] is None else f" misclassification {row['misclassification']:.4f}"
        print(f"sigma {row['sigma']}: models {row['models']}{error} [{row['status']}]")
    return list(rows)


def regroup_order(n_columns: int, groups: List[List[int]]) -> np.ndarray:
    """Columns claimed by each bicluster first, in extraction order, then the rest"""
    seen = set()
    order = []
    for group in groups:
        for j in group:
            if 0 <= j < n_columns and j not in seen:
                seen.add(j)
                order.append(j)
    order.extend(j for j in range(n_columns) if j not in seen)
    return np.asarray(order, dtype=int)


def cmd_report(config: RunConfig) -> List[Dict[str, Any]]:
    """Heat maps of the dumped preference matrix and the model table of a fit run"""
    source = Path(config.input)
    result_path = source / 'result.json'
    if not result_path.exists():
        raise InvalidParams(f"No result.json in {source}")
    with open(result_path) as f:
        result = json.load(f)
    P = read_matrix_csv(source / 'preference.csv')

    plot_preference(P, config.output_dir / 'preference_before.svg', 'preference matrix')
    order = regroup_order(P.shape[1], result.get('bicluster_columns', []))
    labels = np.asarray(result.get('assignment') or [0] * P.shape[0], dtype=float)
    labels[labels == 0] = np.inf  # Outliers last
    rows = np.argsort(labels, kind='stable')
    plot_preference(P[np.ix_(rows, order)], config.output_dir / 'preference_after.svg', 'regrouped by bicluster')

    models = result['models']
    print(f"{'#':>3} {'family':<12} {'support':>8} {'log10 p':>10}  theta")
    for t, model in enumerate(models, start=1):
        theta = ', '.join(f"{v:.4g}" for v in model['theta'])
        print(f"{t:>3} {model['family']:<12} {model['support_size']:>8} {model['log10_p_value']:>10.2f}  ({theta})")
    if result.get('misclassification') is not None:
        print(f"misclassification: {result['misclassification']:.4f}")
    return models
