"""
Per-command run configuration
Precedence: defaults < JSON file given with --config < command-line flags
"""
import json
import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..config import FIT_DEFAULTS, NMU_DEFAULTS, NMU_ON_PREFERENCE
from ..errors import InvalidParams
from ..models import FitConfig, NmuConfig

logger = logging.getLogger('cli')

COMMANDS = ('nmu', 'synth', 'fit', 'sweep', 'report')

# Keys a --config file may set, per command
_COMMON = {'input', 'output_dir', 'seed', 'diagnostics_log'}
_NMU = {'rank', 'gamma', 'xi', 'residual_weight', 'tau', 'max_iters', 'polish', 'compare_svd'}
_SYNTH = {'kind', 'k', 'n_points', 'noise', 'outlier_ratio'}
_FIT = {
    'family', 'sigma', 'pool_size', 'prefilter', 'exclusive', 'post_test', 'corr_threshold',
    'max_biclusters', 'alpha_override', 'cdf_support', 'p_method', 'nmu_tau', 'nmu_max_iters'
}
ALLOWED_KEYS = {
    'nmu': _COMMON | _NMU,
    'synth': _COMMON | _SYNTH,
    'fit': _COMMON | _FIT,
    'sweep': _COMMON | _FIT | {'sigmas'},
    'report': _COMMON
}
# Commands whose --input must exist before anything runs
NEEDS_INPUT = {'nmu', 'fit', 'sweep', 'report'}


@dataclass
class RunConfig:
    command: str
    input: Optional[Path] = None
    output_dir: Path = Path('out')
    seed: int = FIT_DEFAULTS['seed']
    diagnostics_log: Optional[Path] = None

    # nmu
    rank: int = 5
    gamma: float = NMU_DEFAULTS['gamma']
    xi: float = NMU_DEFAULTS['xi']
    residual_weight: float = NMU_DEFAULTS['residual_weight']
    tau: float = NMU_DEFAULTS['tau']
    max_iters: int = NMU_DEFAULTS['max_iters']
    polish: bool = NMU_DEFAULTS['polish']
    compare_svd: bool = False

    # synth
    kind: str = 'star'
    k: Optional[int] = None
    n_points: Optional[int] = None
    noise: Optional[float] = None
    outlier_ratio: Optional[float] = None

    # fit / sweep
    family: Optional[str] = None
    sigma: Optional[float] = None
    sigmas: List[float] = field(default_factory=list)
    pool_size: Optional[int] = None
    prefilter: bool = FIT_DEFAULTS['prefilter']
    exclusive: bool = FIT_DEFAULTS['exclusive_assignment']
    post_test: bool = FIT_DEFAULTS['post_test']
    corr_threshold: float = FIT_DEFAULTS['corr_threshold']
    max_biclusters: int = FIT_DEFAULTS['max_biclusters']
    alpha_override: Optional[float] = FIT_DEFAULTS['alpha_override']
    cdf_support: str = FIT_DEFAULTS['cdf_support']
    p_method: str = FIT_DEFAULTS['p_method']
    nmu_tau: float = NMU_ON_PREFERENCE['tau']
    nmu_max_iters: int = NMU_ON_PREFERENCE['max_iters']

    def nmu_config(self) -> NmuConfig:
        return NmuConfig(
            gamma=self.gamma, xi=self.xi, residual_weight=self.residual_weight, tau=self.tau,
            max_iters=self.max_iters, polish=self.polish
        )

    def fit_config(self, sigma: Optional[float] = None) -> FitConfig:
        sigma = self.sigma if sigma is None else sigma
        if sigma is None:
            raise InvalidParams("--sigma is required")
        return FitConfig(
            sigma=float(sigma),
            corr_threshold=self.corr_threshold,
            max_biclusters=self.max_biclusters,
            alpha_override=self.alpha_override,
            exclusive_assignment=self.exclusive,
            prefilter=self.prefilter,
            post_test=self.post_test,
            cdf_support=self.cdf_support,
            p_method=self.p_method,
            seed=self.seed,
            pool_size=self.pool_size,
            nmu=NmuConfig(tau=self.nmu_tau, max_iters=self.nmu_max_iters, record_history=False)
        )

    def to_dict(self) -> Dict[str, Any]:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = str(value) if isinstance(value, Path) else value
        return out


def _read_config_file(path: Path, command: str) -> Dict[str, Any]:
    if not path.exists():
        raise InvalidParams(f"Config file not found: {path}")
    try:
        with open(path) as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidParams(f"Config file {path} is not valid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise InvalidParams(f"Config file {path} must hold a JSON object")
    unknown = sorted(set(raw) - ALLOWED_KEYS[command])
    if unknown:
        raise InvalidParams(f"Unknown key(s) for '{command}' in {path}: {', '.join(unknown)}")
    return raw


def _coerce(values: Dict[str, Any]) -> Dict[str, Any]:
    for key in ('input', 'output_dir', 'diagnostics_log'):
        if values.get(key) is not None:
            values[key] = Path(values[key])
    return values


def build_run_config(command: str, flags: Dict[str, Any], config_path: Optional[str] = None) -> RunConfig:
    """
    Merge defaults, the optional JSON file and the flags that were actually given
    (None means not given), then validate paths and create the output directory.
    """
    if command not in COMMANDS:
        raise InvalidParams(f"Unknown command: {command}")

    config = RunConfig(command=command)
    if config_path:
        config = replace(config, **_coerce(_read_config_file(Path(config_path), command)))
    given = {k: v for k, v in flags.items() if v is not None and k in ALLOWED_KEYS[command]}
    config = replace(config, **_coerce(given))

    validate_run_config(config)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    logger.debug(f"Run configuration: {config.to_dict()}")
    return config


def validate_run_config(config: RunConfig):
    if config.seed < 0:
        raise InvalidParams(f"--seed must be nonnegative, got {config.seed}")
    if config.command in NEEDS_INPUT:
        if config.input is None:
            raise InvalidParams(f"'{config.command}' needs --input")
        if not config.input.exists():
            raise InvalidParams(f"Input not found: {config.input}")
    if config.command == 'nmu' and config.rank < 1:
        raise InvalidParams(f"--rank must be at least 1, got {config.rank}")
    if config.command == 'fit' and config.sigma is None:
        raise InvalidParams("'fit' needs --sigma")
    if config.command == 'sweep' and not config.sigmas:
        raise InvalidParams("'sweep' needs a nonempty list of sigmas")
    if config.pool_size is not None and config.pool_size < 1:
        raise InvalidParams(f"--pool-size must be at least 1, got {config.pool_size}")
