import sys
import json
import logging
from pathlib import Path

import numpy as np
import pytest

# Add the project root to the Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.cli import (
    build_run_config, cmd_fit, cmd_nmu, cmd_report, cmd_sweep, cmd_synth,
    load_dataset, regroup_order, synthesize, write_dataset
)
from src.errors import InvalidParams
from src.main import main
from src.matlib import read_matrix_csv, write_matrix_csv
from src.robustfit import fit_models

logger = logging.getLogger('test')


@pytest.fixture
def restore_logging():
    """main() reconfigures the root logger; put pytest's handlers back afterwards"""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
    diagnostics = logging.getLogger('diagnostics')
    for handler in list(diagnostics.handlers):
        diagnostics.removeHandler(handler)
        handler.close()
    diagnostics.propagate = True


@pytest.fixture
def stairs_file(tmp_path):
    dataset = synthesize('stairs', seed=5, k=2, n_points=200, noise=0.003, outlier_ratio=0.2)
    return write_dataset(tmp_path / 'stairs.json', dataset)


def _fit_config(dataset_path, out_dir, **flags):
    return build_run_config('fit', {'input': str(dataset_path), 'output_dir': str(out_dir), 'sigma': 0.02, **flags})


# Run configuration

def test_config_file_and_flag_precedence(tmp_path, stairs_file):
    config_file = tmp_path / 'fit.json'
    config_file.write_text(json.dumps({'sigma': 0.5, 'pool_size': 100, 'corr_threshold': 0.7}))
    config = build_run_config(
        'fit',
        {'input': str(stairs_file), 'output_dir': str(tmp_path / 'out'), 'sigma': 0.2, 'pool_size': None, 'command': 'fit'},
        str(config_file)
    )
    assert config.sigma == 0.2
    assert config.pool_size == 100
    assert config.corr_threshold == 0.7
    assert config.max_biclusters == 50
    assert config.input == stairs_file
    assert (tmp_path / 'out').is_dir()

    fit = config.fit_config()
    assert fit.sigma == 0.2 and fit.pool_size == 100 and fit.corr_threshold == 0.7
    assert fit.nmu.tau == 1e-4 and fit.nmu.max_iters == 200


def test_config_errors(tmp_path, stairs_file):
    unknown = tmp_path / 'unknown.json'
    unknown.write_text(json.dumps({'rank': 3}))
    with pytest.raises(InvalidParams):
        build_run_config('fit', {'input': str(stairs_file), 'sigma': 0.1}, str(unknown))

    broken = tmp_path / 'broken.json'
    broken.write_text('{"sigma": ')
    with pytest.raises(InvalidParams):
        build_run_config('fit', {'input': str(stairs_file), 'sigma': 0.1}, str(broken))

    with pytest.raises(InvalidParams):
        build_run_config('fit', {'input': str(stairs_file), 'sigma': 0.1}, str(tmp_path / 'none.json'))
    with pytest.raises(InvalidParams):
        build_run_config('fit', {'input': str(tmp_path / 'missing.json'), 'sigma': 0.1})
    with pytest.raises(InvalidParams):
        build_run_config('fit', {'input': str(stairs_file)})
    with pytest.raises(InvalidParams):
        build_run_config('sweep', {'input': str(stairs_file), 'sigmas': []})
    with pytest.raises(InvalidParams):
        build_run_config('nmu', {'input': str(stairs_file), 'rank': 0})
    with pytest.raises(InvalidParams):
        build_run_config('plot', {})
    with pytest.raises(InvalidParams):
        build_run_config('synth', {'seed': -1, 'output_dir': str(tmp_path / 'synth')})


# Synthetic data

def test_synthesize_counts_and_labels():
    dataset = synthesize('star', seed=0)
    assert dataset.points.shape == (500, 2)
    assert np.count_nonzero(dataset.labels == 0) == 250
    assert [np.count_nonzero(dataset.labels == t) for t in range(1, 6)] == [50] * 5
    assert len(dataset.models) == 5
    assert dataset.meta['kind'] == 'star' and dataset.meta['k'] == 5

    again = synthesize('star', seed=0)
    assert np.array_equal(again.points, dataset.points)
    assert not np.array_equal(synthesize('star', seed=1).points, dataset.points)

    correspondences = synthesize('homography', seed=0, k=3, n_points=400, outlier_ratio=0.25)
    assert correspondences.points.shape == (400, 4)
    assert np.count_nonzero(correspondences.labels == 0) == 100


def test_noiseless_inliers_lie_on_their_models():
    dataset = synthesize('circles', seed=2, noise=0.0)
    for t, model in enumerate(dataset.models, start=1):
        inliers = dataset.points[dataset.labels == t]
        assert model.family.residuals(model.theta, inliers).max() <= 1e-12


def test_synthesize_rejects_bad_parameters():
    with pytest.raises(InvalidParams):
        synthesize('spiral')
    with pytest.raises(InvalidParams):
        synthesize('star', k=0)
    with pytest.raises(InvalidParams):
        synthesize('star', noise=-1.0)
    with pytest.raises(InvalidParams):
        synthesize('star', outlier_ratio=1.0)
    with pytest.raises(InvalidParams):
        synthesize('circles', k=5, n_points=20, outlier_ratio=0.5)
    with pytest.raises(InvalidParams):
        synthesize('star', seed=-1)


def test_intersecting_circles_share_points():
    sigma = 0.047
    for seed in range(20):
        dataset = synthesize('circles', seed=seed, k=5)
        X = dataset.points
        near = np.column_stack([m.family.residuals(m.theta, X) <= 3.0 * sigma for m in dataset.models])
        assert np.any(near.sum(axis=1) >= 2), f"seed {seed}"


def test_dataset_file_round_trip(tmp_path):
    dataset = synthesize('stairs', seed=4)
    loaded = load_dataset(write_dataset(tmp_path / 'd.json', dataset))
    assert loaded.family == 'line2d'
    assert np.array_equal(loaded.points, dataset.points)
    assert np.array_equal(loaded.labels, dataset.labels)
    assert all(np.array_equal(a.theta, b.theta) for a, b in zip(loaded.models, dataset.models))
    assert loaded.meta['seed'] == 4


def test_load_dataset_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_dataset(tmp_path / 'missing.json')

    cases = {
        'broken.json': '[1, 2',
        'keys.json': json.dumps({'points': [[0, 0]]}),
        'family.json': json.dumps({'family': 'ellipse', 'points': [[0, 0]]}),
        'dims.json': json.dumps({'family': 'line2d', 'points': [[0, 0, 0]]}),
        'labels.json': json.dumps({'family': 'line2d', 'points': [[0, 0], [1, 1]], 'labels': [1]}),
        'negative.json': json.dumps({'family': 'line2d', 'points': [[0, 0], [1, 1]], 'labels': [1, -1]})
    }
    for name, text in cases.items():
        path = tmp_path / name
        path.write_text(text)
        with pytest.raises(InvalidParams):
            load_dataset(path)

    unlabeled = tmp_path / 'unlabeled.json'
    unlabeled.write_text(json.dumps({'family': 'line2d', 'points': [[0, 0], [1, 1]]}))
    assert not load_dataset(unlabeled).has_labels


def test_cmd_synth_writes_dataset(tmp_path):
    config = build_run_config('synth', {'kind': 'stairs', 'seed': 1, 'output_dir': str(tmp_path)})
    path = cmd_synth(config)
    assert path == tmp_path / 'dataset.json'
    loaded = load_dataset(path)
    assert np.array_equal(loaded.points, synthesize('stairs', seed=1).points)


# Commands

def test_cmd_nmu_outputs(tmp_path, capsys):
    A = np.random.default_rng(0).uniform(size=(8, 6))
    write_matrix_csv(tmp_path / 'a.csv', A)
    out = tmp_path / 'nmu'
    config = build_run_config('nmu', {'input': str(tmp_path / 'a.csv'), 'output_dir': str(out), 'rank': 2, 'compare_svd': True})
    summary = cmd_nmu(config)

    assert 1 <= summary['factors'] <= 2
    assert summary['shape'] == [8, 6]
    assert summary['negative_entries'] == 0 and summary['min_residual'] >= 0.0
    assert 0.0 <= summary['relative_error'] < 1.0
    assert len(summary['svd_negative_entries']) >= 1
    assert read_matrix_csv(out / 'factors_u.csv').shape == (8, summary['factors'])
    assert read_matrix_csv(out / 'factors_v.csv').shape == (6, summary['factors'])
    for name in ('factors.json', 'convergence.svg', 'residual_histogram.svg'):
        assert (out / name).stat().st_size > 0
    meta = json.loads((out / 'factors.json').read_text())
    assert len(meta['factors']) == summary['factors']
    assert meta['summary']['negative_entries'] == 0
    assert 'factors: ' in capsys.readouterr().out


def test_cmd_fit_outputs(tmp_path, stairs_file, capsys):
    out = tmp_path / 'fit'
    row = cmd_fit(_fit_config(stairs_file, out))

    result = json.loads((out / 'result.json').read_text())
    assert row['models'] == len(result['models'])
    assert row['status'] == 'ok'
    assert result['misclassification'] == row['misclassification']
    assert row['oracle_misclassification'] is not None
    assert len(result['assignment']) == 200
    assert result['config']['sigma'] == 0.02
    assert len(result['bicluster_columns']) == len(result['candidates'])

    memberships = read_matrix_csv(out / 'memberships.csv')
    assert memberships.shape == (200, max(row['models'], 1))
    preference = read_matrix_csv(out / 'preference.csv')
    assert preference.shape[0] == 200
    assert preference.shape[1] == max(result['diagnostics']['active_after_prefilter'], 1)
    assert (out / 'overlay.svg').stat().st_size > 0
    assert f"models: {row['models']}" in capsys.readouterr().out


def test_cmd_fit_is_byte_identical(tmp_path, stairs_file):
    out = tmp_path / 'fit'
    cmd_fit(_fit_config(stairs_file, out))
    first = {name: (out / name).read_bytes() for name in ('result.json', 'memberships.csv', 'overlay.svg')}
    cmd_fit(_fit_config(stairs_file, out))
    for name, content in first.items():
        assert (out / name).read_bytes() == content


def test_cmd_fit_rejects_family_mismatch(tmp_path, stairs_file):
    with pytest.raises(InvalidParams):
        cmd_fit(_fit_config(stairs_file, tmp_path / 'fit', family='circle2d'))


def test_regroup_order():
    assert regroup_order(5, [[3, 1], [1, 4], [9]]).tolist() == [3, 1, 4, 0, 2]
    assert regroup_order(3, []).tolist() == [0, 1, 2]


def test_cmd_report(tmp_path, stairs_file, capsys):
    fit_dir = tmp_path / 'fit'
    cmd_fit(_fit_config(stairs_file, fit_dir))
    capsys.readouterr()

    out = tmp_path / 'report'
    models = cmd_report(build_run_config('report', {'input': str(fit_dir), 'output_dir': str(out)}))
    assert (out / 'preference_before.svg').stat().st_size > 0
    assert (out / 'preference_after.svg').stat().st_size > 0
    assert models == json.loads((fit_dir / 'result.json').read_text())['models']
    assert 'family' in capsys.readouterr().out

    with pytest.raises(InvalidParams):
        cmd_report(build_run_config('report', {'input': str(tmp_path), 'output_dir': str(out)}))


@pytest.mark.asyncio
async def test_cmd_sweep_rows(tmp_path, stairs_file, mocker):
    real = fit_models

    def flaky(points, family, config):
        if config.sigma == 0.5:
            raise InvalidParams("forced failure")
        return real(points, family, config)

    mocker.patch('src.cli.commands.fit_models', side_effect=flaky)
    out = tmp_path / 'sweep'
    config = build_run_config('sweep', {'input': str(stairs_file), 'output_dir': str(out), 'sigmas': [0.02, 0.5, 0.03]})
    rows = await cmd_sweep(config)

    assert [r['sigma'] for r in rows] == [0.02, 0.5, 0.03]
    assert rows[0]['status'] == 'ok' and rows[2]['status'] == 'ok'
    assert rows[1]['status'].startswith('error') and rows[1]['models'] is None

    lines = (out / 'sweep.csv').read_text().splitlines()
    assert lines[0] == 'sigma,models,misclassification,oracle_misclassification,status'
    assert len(lines) == 4
    assert lines[2].startswith('0.5,,')
    assert (out / 'sweep.svg').stat().st_size > 0


@pytest.mark.asyncio
async def test_cmd_sweep_single_sigma(tmp_path, stairs_file):
    out = tmp_path / 'sweep'
    rows = await cmd_sweep(build_run_config('sweep', {'input': str(stairs_file), 'output_dir': str(out), 'sigmas': [0.02]}))
    assert len(rows) == 1 and rows[0]['status'] == 'ok'
    assert len((out / 'sweep.csv').read_text().splitlines()) == 2


@pytest.mark.slow
@pytest.mark.asyncio
async def test_sweep_is_stable_on_the_star(tmp_path):
    path = write_dataset(tmp_path / 'star.json', synthesize('star', seed=0))
    sigmas = [0.025, 0.030, 0.035, 0.040, 0.045]
    rows = await cmd_sweep(build_run_config('sweep', {'input': str(path), 'output_dir': str(tmp_path), 'sigmas': sigmas}))
    assert [r['models'] for r in rows] == [5] * 5


# Entry point

@pytest.mark.asyncio
async def test_main_exit_codes(tmp_path, stairs_file, capsys, restore_logging):
    write_matrix_csv(tmp_path / 'zero.csv', np.zeros((3, 3)))
    code = await main(['nmu', '--input', str(tmp_path / 'zero.csv'), '--output-dir', str(tmp_path / 'out')])
    assert code == 1
    assert 'error: ZeroMatrix' in capsys.readouterr().err

    code = await main(['fit', '--input', str(tmp_path / 'missing.json'), '--sigma', '0.1', '--output-dir', str(tmp_path / 'out')])
    assert code == 1
    assert 'error: InvalidParams' in capsys.readouterr().err

    code = await main(['synth', '--kind', 'stairs', '--output-dir', str(tmp_path / 'synth')])
    assert code == 0
    assert (tmp_path / 'synth' / 'dataset.json').exists()

    code = await main(['synth', '--seed', '-1', '--output-dir', str(tmp_path / 'synth')])
    assert code == 1
    assert 'error: InvalidParams' in capsys.readouterr().err

    diagnostics = tmp_path / 'diagnostics.log'
    code = await main([
        'fit', '--input', str(stairs_file), '--sigma', '0.02',
        '--output-dir', str(tmp_path / 'fit'), '--diagnostics-log', str(diagnostics)
    ])
    assert code == 0
    assert 'bicluster=' in diagnostics.read_text()
