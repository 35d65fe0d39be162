"""
Experiment pipelines: solve, simulate, sweep and inspect
"""
import os
import sys
import time
from typing import Dict, List, Optional, Tuple

import pandas as pd
from joblib import Parallel, delayed

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.policy_table import PolicyTable, load_policy, save_policy
from analysis.slicing import DISPLAY_ORDER, parse_slice_spec, policy_slice
from analysis.switching import verify_switching
from experiments.config import ExperimentConfig, Scenario
from logger import RelayLogger, setup_logger
from mdp.kernel import FactoredKernel
from mdp.model import State, SystemParams
from simulator.engine import SimMetrics, run_simulation
from simulator.executors import (
    BUILTIN_EXECUTORS, MixingExecutor, TableExecutor,
    lower_bound_params, make_builtin_executor
)
from solver.bisection import CmdpSolution, bisection_solve
from solver.evaluation import evaluate_policy_exact
from solver.rvi import SolverConfig


METHOD_DETER = 'Deter.'
METHOD_MIX = 'Mix.'
METHOD_GREEDY = 'Greedy'
METHOD_LOWER_BOUND = 'Lower bound'

ExecutorSpec = Tuple[str, object]


def simulate_seed(
    spec: ExecutorSpec,
    params: SystemParams,
    horizon: int,
    seed: int,
    age_cap: Optional[int] = None
) -> SimMetrics:
    """Build a fresh executor for one seed and run it"""
    kind, payload = spec
    if kind == 'builtin':
        executor = make_builtin_executor(payload, params)
    elif kind == 'table':
        executor = TableExecutor(payload)
    elif kind == 'mixed':
        plus, minus, eta = payload
        executor = MixingExecutor(plus, minus, eta, seed)
    else:
        raise ValueError(f"Unknown executor kind {kind!r}")
    return run_simulation(executor, params, horizon, seed, age_cap)


def simulate_seeds(
    spec: ExecutorSpec,
    params: SystemParams,
    horizon: int,
    seeds: List[int],
    n_jobs: int = 1,
    age_cap: Optional[int] = None
) -> List[SimMetrics]:
    """Independent runs, one per seed, returned in seed order"""
    return Parallel(n_jobs=n_jobs)(
        delayed(simulate_seed)(spec, params, horizon, seed, age_cap) for seed in seeds
    )


def _seed_frame(runs: List[SimMetrics]) -> pd.DataFrame:
    """One row of metrics per seed"""
    return pd.DataFrame([
        {
            'seed': run.seed,
            'T': run.horizon,
            'avg_sum_aoi': run.avg_sum_aoi,
            'avg_transmissions': run.avg_transmissions,
            'aoi_source1': run.per_source_aoi[0],
            'aoi_source2': run.per_source_aoi[1],
            'unbounded_trend': run.unbounded_trend
        }
        for run in runs
    ])


def seed_statistics(frame: pd.DataFrame, columns: List[str]) -> pd.DataFrame:
    """Mean and standard error over seeds; a single seed has zero standard error"""
    return frame[columns].agg(['mean', 'sem']).fillna(0.0)


def _display_state(state: State) -> str:
    values = dict(zip(('theta1', 'x1', 'y1', 'theta2', 'x2', 'y2'), state.as_tuple()))
    return '(' + ','.join(str(values[name]) for name in DISPLAY_ORDER) + ')'


def _solution_summary(solution: CmdpSolution, gamma_max: float, wall_time: float) -> Dict:
    return {
        'gamma_max': gamma_max,
        'lambda_minus': solution.lambda_minus,
        'lambda_plus': solution.lambda_plus,
        'j_plus': solution.eval_plus.avg_aoi,
        'j_minus': solution.eval_minus.avg_aoi,
        'd_plus': solution.eval_plus.avg_transmissions,
        'd_minus': solution.eval_minus.avg_transmissions,
        'eta': solution.eta,
        'j_mix': solution.j_mix,
        'gain_plus': solution.gain_plus,
        'gain_minus': solution.gain_minus,
        'dual_bound': solution.dual_bound,
        'rvi_iterations': solution.rvi_iterations,
        'bisection_steps': len(solution.trace),
        'constraint_slack': solution.constraint_slack,
        'note': 'constraint slack at lambda=0' if solution.constraint_slack else '',
        'wall_time_s': wall_time
    }


def _sweep_point(
    scenario: Scenario,
    gamma_max: float,
    solver_cfg: SolverConfig,
    horizon: int,
    seeds: List[int]
) -> List[Dict]:
    """Deter./Mix. by exact evaluation, Greedy by simulation; failures become rows"""
    rows = []
    base = {'scenario': scenario.label, 'gamma_max': gamma_max}

    try:
        params = scenario.params(gamma_max)
        solution = bisection_solve(params, solver_cfg, FactoredKernel(params, solver_cfg.n))
        mix_tx = (
            solution.eta * solution.eval_plus.avg_transmissions
            + (1.0 - solution.eta) * solution.eval_minus.avg_transmissions
        )
        rows.append({**base, 'method': METHOD_DETER, 'avg_sum_aoi': solution.eval_plus.avg_aoi,
                     'avg_transmissions': solution.eval_plus.avg_transmissions,
                     'evaluation': 'exact', 'status': 'ok', 'error': ''})
        rows.append({**base, 'method': METHOD_MIX, 'avg_sum_aoi': solution.j_mix,
                     'avg_transmissions': mix_tx,
                     'evaluation': 'exact', 'status': 'ok', 'error': ''})
    except Exception as e:
        for method in (METHOD_DETER, METHOD_MIX):
            rows.append({**base, 'method': method, 'avg_sum_aoi': float('nan'),
                         'avg_transmissions': float('nan'),
                         'evaluation': 'exact', 'status': 'error', 'error': str(e)})

    try:
        params = scenario.params(gamma_max)
        runs = [simulate_seed(('builtin', 'greedy'), params, horizon, seed) for seed in seeds]
        means = _seed_frame(runs)[['avg_sum_aoi', 'avg_transmissions']].mean()
        rows.append({**base, 'method': METHOD_GREEDY,
                     'avg_sum_aoi': float(means['avg_sum_aoi']),
                     'avg_transmissions': float(means['avg_transmissions']),
                     'evaluation': 'simulation', 'status': 'ok', 'error': ''})
    except Exception as e:
        rows.append({**base, 'method': METHOD_GREEDY, 'avg_sum_aoi': float('nan'),
                     'avg_transmissions': float('nan'),
                     'evaluation': 'simulation', 'status': 'error', 'error': str(e)})
    return rows


class ExperimentRunner:
    """Runs the four pipelines and writes their CSV / policy outputs"""

    def __init__(self, config: ExperimentConfig, logger: Optional[RelayLogger] = None):
        self.config = config
        self.logger = logger or setup_logger(config.raw)
        os.makedirs(config.output_dir, exist_ok=True)

    def _write_csv(
        self,
        df: pd.DataFrame,
        suffix: str,
        comments: Optional[List[str]] = None,
        index: bool = False
    ) -> str:
        path = self.config.output_path(suffix)
        with open(path, 'w', newline='') as f:
            f.write(f"# config_hash={self.config.config_hash()}\n")
            for line in comments or []:
                f.write(f"# {line}\n")
            df.to_csv(f, index=index, float_format='%.10g')
        self.logger.info(f"Wrote {path}")
        return path

    def solve(self) -> Tuple[CmdpSolution, Dict[str, str]]:
        cfg = self.config
        self.logger.info(
            f"Solving CMDP: mu=({cfg.params.mu1}, {cfg.params.mu2}), p={cfg.params.p}, "
            f"q={cfg.params.q}, gamma_max={cfg.params.gamma_max}, N={cfg.solver.n}"
        )
        start = time.perf_counter()
        solution = bisection_solve(cfg.params, cfg.solver)
        wall_time = time.perf_counter() - start

        paths = {
            'policy_plus': cfg.output_path('policy_plus.txt'),
            'policy_minus': cfg.output_path('policy_minus.txt')
        }
        save_policy(solution.policy_plus, paths['policy_plus'])
        save_policy(solution.policy_minus, paths['policy_minus'])

        summary = _solution_summary(solution, cfg.params.gamma_max, wall_time)
        paths['summary'] = self._write_csv(pd.DataFrame([summary]), 'solve_summary.csv')

        trace = pd.DataFrame([
            {
                'step': k,
                'lambda': step.lambda_value,
                'avg_transmissions': step.avg_transmissions,
                'avg_sum_aoi': step.avg_aoi,
                'gain': step.gain,
                'rvi_iterations': step.rvi_iterations,
                'branch': step.branch
            }
            for k, step in enumerate(solution.trace)
        ])
        paths['trace'] = self._write_csv(trace, 'bisection_trace.csv')

        self.logger.log_cmdp_solution(summary)
        return solution, paths

    def _resolve_policy(self, policy_ref: str) -> Tuple[str, ExecutorSpec, SystemParams, Optional[PolicyTable]]:
        cfg = self.config
        if policy_ref in BUILTIN_EXECUTORS:
            params = lower_bound_params(cfg.params) if policy_ref == 'lower-bound' else cfg.params
            return policy_ref, ('builtin', policy_ref), params, None

        policy = load_policy(policy_ref, expected_n=cfg.solver.n)
        if policy.params_hash and policy.params_hash != cfg.params.params_hash():
            self.logger.warning(
                f"{policy_ref} was solved for different system parameters "
                f"(params_hash {policy.params_hash} != {cfg.params.params_hash()})"
            )
        name = os.path.splitext(os.path.basename(policy_ref))[0]
        return name, ('table', policy), cfg.params, policy

    def simulate(self, policy_ref: str) -> str:
        cfg = self.config
        name, spec, params, policy = self._resolve_policy(policy_ref)
        self.logger.info(f"Simulating '{name}' for {cfg.horizon} slots x {len(cfg.seeds)} seeds")

        frame = _seed_frame(simulate_seeds(spec, params, cfg.horizon, cfg.seeds, cfg.n_jobs))
        columns = ['avg_sum_aoi', 'avg_transmissions', 'aoi_source1', 'aoi_source2']
        if cfg.age_cap is not None:
            capped = _seed_frame(
                simulate_seeds(spec, params, cfg.horizon, cfg.seeds, cfg.n_jobs, cfg.age_cap)
            )
            frame['capped_avg_sum_aoi'] = capped['avg_sum_aoi'].to_numpy()
            frame['capped_avg_transmissions'] = capped['avg_transmissions'].to_numpy()
            columns += ['capped_avg_sum_aoi', 'capped_avg_transmissions']

        exact_aoi, exact_tx = None, None
        if policy is not None:
            evaluation = evaluate_policy_exact(
                policy, params, policy.n, direct_max_states=cfg.solver.direct_max_states
            )
            exact_aoi, exact_tx = evaluation.avg_aoi, evaluation.avg_transmissions

        stats = seed_statistics(frame, columns)
        mean_row = {'seed': 'mean', 'T': cfg.horizon,
                    'unbounded_trend': bool(frame['unbounded_trend'].any()),
                    **stats.loc['mean'].to_dict()}
        stderr_row = {'seed': 'stderr', 'T': cfg.horizon, 'unbounded_trend': '',
                      **stats.loc['sem'].to_dict()}
        df = pd.DataFrame(frame.to_dict('records') + [mean_row, stderr_row], columns=frame.columns)
        if policy is not None:
            df['exact_avg_sum_aoi'] = exact_aoi
            df['exact_avg_transmissions'] = exact_tx

        comments = []
        if policy_ref == 'lower-bound':
            comments.append('lower bound approximated by the greedy policy with gamma_max=2, mu=(1,1)')
        if cfg.age_cap is not None:
            comments.append(f"capped_* columns clamp absolute ages at {cfg.age_cap}")
        path = self._write_csv(df, f"simulate_{name}.csv", comments)

        self.logger.log_simulation_summary(
            name, {**mean_row, 'exact_avg_sum_aoi': exact_aoi}, len(cfg.seeds)
        )
        return path

    def sweep(self) -> str:
        cfg = self.config
        if not cfg.gamma_values:
            raise ValueError("sweep.gamma_values must list at least one budget")

        rows: List[Dict] = []
        for scenario in cfg.scenarios:
            lb_params = lower_bound_params(scenario.params(2.0))
            try:
                runs = simulate_seeds(('builtin', 'lower-bound'), lb_params, cfg.horizon, cfg.seeds, cfg.n_jobs)
                means = _seed_frame(runs)[['avg_sum_aoi', 'avg_transmissions']].mean()
                lower_bound = {
                    'avg_sum_aoi': float(means['avg_sum_aoi']),
                    'avg_transmissions': float(means['avg_transmissions']),
                    'status': 'ok', 'error': ''
                }
            except Exception as e:
                lower_bound = {'avg_sum_aoi': float('nan'), 'avg_transmissions': float('nan'),
                               'status': 'error', 'error': str(e)}

            points = Parallel(n_jobs=cfg.n_jobs)(
                delayed(_sweep_point)(scenario, gamma, cfg.solver, cfg.horizon, cfg.seeds)
                for gamma in cfg.gamma_values
            )
            for gamma, point_rows in zip(cfg.gamma_values, points):
                point_rows.append({
                    'scenario': scenario.label, 'gamma_max': gamma,
                    'method': METHOD_LOWER_BOUND, 'evaluation': 'simulation', **lower_bound
                })
                self.logger.log_sweep_point(
                    scenario.label, gamma,
                    {row['method']: row['avg_sum_aoi'] for row in point_rows}
                )
                for row in point_rows:
                    if row['status'] != 'ok':
                        self.logger.warning(
                            f"[{scenario.label}] gamma_max={gamma} {row['method']} failed: {row['error']}"
                        )
                rows.extend(point_rows)

        columns = ['scenario', 'gamma_max', 'method', 'avg_sum_aoi', 'avg_transmissions',
                   'evaluation', 'status', 'error']
        df = pd.DataFrame(rows)[columns]
        return self._write_csv(
            df, 'sweep.csv',
            ['Lower bound: greedy policy with gamma_max=2 and mu=(1,1), an approximation']
        )

    def inspect(self, policy_path: str, fixed_text: str, free_text: str, component: str = 'beta') -> Dict[str, str]:
        policy = load_policy(policy_path)
        fixed, free = parse_slice_spec(fixed_text, free_text)
        grid = policy_slice(policy, fixed, free, component)

        paths = {
            'slice': self._write_csv(
                grid.to_dataframe(), f"slice_{component}_{free[0]}_{free[1]}.csv",
                [f"component={component}", f"state {grid.label()}"],
                index=True
            )
        }

        reports = verify_switching(policy)
        error_free = self.config.params.p == 1.0 and self.config.params.q == 1.0
        violation_rows = []
        for axis, report in reports.items():
            message = (
                f"Switching check along {axis}: {len(report.violations)} violations "
                f"over {report.checked_pairs} checked states"
            )
            if report.violations and error_free:
                self.logger.warning(message + " (links are error-free, structure expected)")
            else:
                self.logger.info(message)
            for here, action, there, other in report.violations:
                violation_rows.append({
                    'axis': axis,
                    'state': _display_state(here),
                    'action': f"({action.alpha},{action.beta})",
                    'next_state': _display_state(there),
                    'next_action': f"({other.alpha},{other.beta})"
                })

        df = pd.DataFrame(violation_rows, columns=['axis', 'state', 'action', 'next_state', 'next_action'])
        paths['switching'] = self._write_csv(
            df, 'switching.csv',
            ['states in (' + ','.join(DISPLAY_ORDER) + ') order'] +
            [f"{axis}: {len(r.violations)} violations" for axis, r in reports.items()]
        )
        return paths
