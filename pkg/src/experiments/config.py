"""
Experiment configuration: YAML file + dotted overrides -> typed config
"""
import copy
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import yaml

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from mdp.model import State, SystemParams
from solver.rvi import SolverConfig


OUTPUT_DIR_ENV = 'RELAY_AOI_OUTPUT_DIR'

DEFAULT_CONFIG = {
    'params': {
        'mu1': 0.6,
        'mu2': 0.9,
        'p': 0.8,
        'q': 0.7,
        'gamma_max': 1.6
    },
    'solver': {
        'n': 7,
        'epsilon': 0.001,
        'zeta': 0.01,
        'lambda_minus_init': 0.0,
        'lambda_plus_init': 1000.0,
        'max_rvi_iters': 100000,
        'ref_state': [0, 0, 0, 0, 0, 0],
        'aperiodicity': 1.0,
        'max_lambda_doublings': 20,
        'direct_max_states': 5000
    },
    'simulation': {
        'horizon': 100000,
        'seeds': list(range(1, 21)),
        'n_jobs': 1,
        'age_cap': None
    },
    'sweep': {
        'gamma_values': [1.0, 1.2, 1.4, 1.6, 1.8, 2.0],
        'scenarios': []
    },
    'output': {
        'directory': None,
        'prefix': 'relay_aoi'
    },
    'logging': {
        'level': 'INFO',
        'format': 'detailed',
        'log_file': None
    }
}


@dataclass
class Scenario:
    """One curve of a budget sweep"""
    label: str
    mu1: float
    mu2: float
    p: float
    q: float

    def params(self, gamma_max: float) -> SystemParams:
        return SystemParams(self.mu1, self.mu2, self.p, self.q, gamma_max)


@dataclass
class ExperimentConfig:
    params: SystemParams
    solver: SolverConfig
    horizon: int
    seeds: List[int]
    n_jobs: int
    age_cap: Optional[int]
    gamma_values: List[float]
    scenarios: List[Scenario]
    output_dir: str
    prefix: str
    raw: Dict = field(default_factory=dict)

    def config_hash(self) -> str:
        payload = json.dumps(self.raw, sort_keys=True, default=str)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:16]

    def output_path(self, suffix: str) -> str:
        return os.path.join(self.output_dir, f"{self.prefix}_{suffix}")


def _merge(base: Dict, update: Dict) -> Dict:
    merged = copy.deepcopy(base)
    for key, value in (update or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def apply_overrides(raw: Dict, overrides: Optional[List[str]]) -> Dict:
    """Apply 'section.key=value' strings; values are parsed as YAML scalars"""
    raw = copy.deepcopy(raw)
    for item in overrides or []:
        dotted, sep, text = item.partition('=')
        if not sep:
            raise ValueError(f"Override {item!r} must look like section.key=value")
        keys = dotted.strip().split('.')
        node = raw
        for key in keys[:-1]:
            if not isinstance(node.get(key), dict):
                raise ValueError(f"Unknown config section in override {dotted!r}")
            node = node[key]
        if keys[-1] not in node:
            raise ValueError(f"Unknown config key {dotted!r}")
        node[keys[-1]] = yaml.safe_load(text)
    return raw


def load_raw_config(config_path: Optional[str] = None, overrides: Optional[List[str]] = None) -> Dict:
    """Defaults, then the YAML file if it exists, then dotted overrides"""
    raw = copy.deepcopy(DEFAULT_CONFIG)
    if config_path and os.path.exists(config_path):
        with open(config_path, 'r') as f:
            raw = _merge(raw, yaml.safe_load(f) or {})
    return apply_overrides(raw, overrides)


def build_config(raw: Dict) -> ExperimentConfig:
    params = SystemParams(**raw['params'])

    solver_raw = dict(raw['solver'])
    ref = solver_raw.pop('ref_state', None) or [0, 0, 0, 0, 0, 0]
    if len(ref) != 6:
        raise ValueError(f"solver.ref_state needs six coordinates, got {ref}")
    solver = SolverConfig(ref_state=State.of(*[int(v) for v in ref]), **solver_raw)

    sim = raw['simulation']
    horizon = int(sim['horizon'])
    if horizon < 1:
        raise ValueError(f"simulation.horizon must be at least 1, got {horizon}")
    seeds = [int(s) for s in (sim.get('seeds') or [])]
    if not seeds:
        raise ValueError("simulation.seeds must list at least one seed")
    age_cap = sim.get('age_cap')
    if age_cap is not None:
        if isinstance(age_cap, bool) or int(age_cap) != age_cap or age_cap < 1:
            raise ValueError(f"simulation.age_cap must be a positive integer or null, got {age_cap!r}")
        age_cap = int(age_cap)

    sweep = raw['sweep']
    scenarios = [
        Scenario(
            label=str(item.get('label') or f"mu=({item['mu1']},{item['mu2']}),p={item['p']},q={item['q']}"),
            mu1=float(item['mu1']), mu2=float(item['mu2']),
            p=float(item['p']), q=float(item['q'])
        )
        for item in (sweep.get('scenarios') or [])
    ]
    if not scenarios:
        scenarios = [Scenario('base', params.mu1, params.mu2, params.p, params.q)]

    output = raw['output']
    output_dir = output.get('directory') or os.environ.get(OUTPUT_DIR_ENV) or 'results'

    return ExperimentConfig(
        params=params,
        solver=solver,
        horizon=horizon,
        seeds=seeds,
        n_jobs=int(sim.get('n_jobs', 1)),
        age_cap=age_cap,
        gamma_values=[float(g) for g in (sweep.get('gamma_values') or [])],
        scenarios=scenarios,
        output_dir=output_dir,
        prefix=str(output.get('prefix') or 'relay_aoi'),
        raw=raw
    )


def load_config(config_path: Optional[str] = None, overrides: Optional[List[str]] = None) -> ExperimentConfig:
    return build_config(load_raw_config(config_path, overrides))
