"""
CLI component initialization
Exposes main interfaces
"""
from .runconfig import RunConfig, build_run_config, validate_run_config, ALLOWED_KEYS
from .synth import Dataset, synthesize, load_dataset, write_dataset, GENERATORS
from .commands import cmd_nmu, cmd_synth, cmd_fit, cmd_sweep, cmd_report, run_fit, regroup_order

__all__ = [
    'RunConfig',
    'build_run_config',
    'validate_run_config',
    'ALLOWED_KEYS',
    'Dataset',
    'synthesize',
    'load_dataset',
    'write_dataset',
    'GENERATORS',
    'cmd_nmu',
    'cmd_synth',
    'cmd_fit',
    'cmd_sweep',
    'cmd_report',
    'run_fit',
    'regroup_order'
]
