"""
Full-size acceptance runs (N=7); enable with --run-slow
"""
import numpy as np
import pytest

from analysis.switching import verify_switching
from experiments.runner import simulate_seeds
from mdp.kernel import FactoredKernel
from mdp.model import SystemParams
from simulator.executors import lower_bound_params
from solver.bisection import bisection_solve
from solver.evaluation import evaluate_policy_exact
from solver.rvi import SolverConfig, bellman_residual, rvi_solve


pytestmark = [pytest.mark.integration, pytest.mark.slow]

SEEDS = list(range(1, 21))
HORIZON = 100000
GREEDY_BUDGETS = (1.0, 1.6)


@pytest.fixture(scope='module')
def cfg():
    """Default solver settings at N=7"""
    return SolverConfig()


@pytest.fixture(scope='module')
def params():
    """Reference system parameters"""
    return SystemParams(0.6, 0.9, 0.8, 0.7, 1.6)


@pytest.fixture(scope='module')
def kernel(params, cfg):
    """N=7 kernel shared across the module"""
    return FactoredKernel(params, cfg.n)


@pytest.fixture(scope='module')
def solution(params, cfg, kernel):
    """Solved constrained problem at the reference parameters"""
    return bisection_solve(params, cfg, kernel)


@pytest.fixture(scope='module')
def reliable_solution(cfg):
    """Solved constrained problem with error-free links"""
    return bisection_solve(SystemParams(0.6, 0.9, 1.0, 1.0, 1.6), cfg)


@pytest.fixture(scope='module')
def greedy_runs(params):
    """Uncapped greedy runs at each budget of GREEDY_BUDGETS"""
    return {
        gamma: simulate_seeds(('builtin', 'greedy'), params.with_budget(gamma), HORIZON, SEEDS)
        for gamma in GREEDY_BUDGETS
    }


def _mean(values):
    return float(np.mean(values))


class TestFullSizeSolve:
    """Acceptance checks on the N=7 solve"""

    def test_bisection_contract(self, solution, params, cfg):
        """Test bracket width, feasibility and the mixed budget"""
        assert solution.lambda_plus - solution.lambda_minus < cfg.zeta
        assert solution.eval_plus.avg_transmissions <= params.gamma_max
        assert solution.eval_minus.avg_transmissions >= params.gamma_max
        assert 0.0 <= solution.eta <= 1.0
        assert solution.j_mix <= solution.eval_plus.avg_aoi + 1e-3

    def test_mixed_cost_between_endpoints(self, solution):
        """Test J(policy_minus) <= J_mix <= J(policy_plus)"""
        assert solution.eval_minus.avg_aoi <= solution.j_mix + 1e-9
        assert solution.j_mix <= solution.eval_plus.avg_aoi + 1e-9

    def test_bellman_residual(self, params, cfg, kernel):
        """Test the greedy policy attains the minimum at termination"""
        result = rvi_solve(params, cfg, 1.0, kernel)
        assert bellman_residual(result, kernel, cfg) <= cfg.epsilon

    def test_dual_monotonicity(self, params, cfg, kernel):
        """Test D non-increasing and J non-decreasing over a lambda grid"""
        evaluations = [
            evaluate_policy_exact(rvi_solve(params, cfg, lam, kernel).policy, params, cfg.n, kernel)
            for lam in (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)
        ]
        for lower, higher in zip(evaluations, evaluations[1:]):
            assert higher.avg_transmissions <= lower.avg_transmissions + 1e-6
            assert higher.avg_aoi >= lower.avg_aoi - 1e-6

    @pytest.mark.parametrize('lam', [0.0, 5.0])
    def test_dead_links_cost_twice_the_cap(self, cfg, lam):
        """Test gain 2N and an all-idle policy when no transmission can succeed"""
        dead = SystemParams(1.0, 1.0, 0.0, 0.0, 1.6)
        result = rvi_solve(dead, cfg, lam)
        assert result.gain == pytest.approx(2 * cfg.n, abs=cfg.epsilon)
        assert np.all(result.policy.actions == 0)

    def test_simulation_agrees_with_exact(self, solution, params, cfg):
        """Test 20-seed Monte Carlo on the capped system against exact evaluation"""
        runs = simulate_seeds(('table', solution.policy_plus), params, HORIZON, SEEDS, age_cap=cfg.n)
        aoi = _mean([r.avg_sum_aoi for r in runs])
        tx = _mean([r.avg_transmissions for r in runs])
        assert aoi == pytest.approx(solution.eval_plus.avg_aoi, rel=0.02)
        assert tx == pytest.approx(solution.eval_plus.avg_transmissions, rel=0.02)

    def test_uncapped_truncation_gap(self, solution, params):
        """Test the uncapped Monte Carlo gap to the truncated chain (about +2.9% at N=7)"""
        runs = simulate_seeds(('table', solution.policy_plus), params, HORIZON, SEEDS)
        aoi = _mean([r.avg_sum_aoi for r in runs])
        tx = _mean([r.avg_transmissions for r in runs])
        gap = (aoi - solution.eval_plus.avg_aoi) / solution.eval_plus.avg_aoi
        assert 0.0 < gap < 0.05
        assert tx == pytest.approx(solution.eval_plus.avg_transmissions, rel=0.01)

    @pytest.mark.parametrize('which', ['policy_minus', 'policy_plus'])
    def test_switching_with_reliable_links(self, reliable_solution, which):
        """Test the relay decision is switching-type in y1 and y2 at both bisection multipliers when p=q=1"""
        reports = verify_switching(getattr(reliable_solution, which), strict=True)
        assert all(r.is_switching for r in reports.values())


class TestFullSizeSweep:
    """Acceptance checks on budget sweeps"""

    def test_deterministic_aoi_non_increasing(self, cfg, kernel):
        """Test Deter. AAoI over the default budget grid"""
        values = []
        for gamma in (1.0, 1.2, 1.4, 1.6, 1.8, 2.0):
            params = SystemParams(0.6, 0.9, 0.8, 0.7, gamma)
            values.append(bisection_solve(params, cfg, kernel).eval_plus.avg_aoi)
        for lower_budget, higher_budget in zip(values, values[1:]):
            assert higher_budget <= lower_budget + 1e-6

    def test_deterministic_beats_greedy(self, params, cfg, kernel, greedy_runs):
        """Test Deter. <= Greedy with a gap that widens as the budget shrinks"""
        gaps = {}
        for gamma in GREEDY_BUDGETS:
            deter = bisection_solve(params.with_budget(gamma), cfg, kernel).eval_plus.avg_aoi
            greedy = _mean([r.avg_sum_aoi for r in greedy_runs[gamma]])
            assert deter <= greedy
            gaps[gamma] = greedy - deter
        assert gaps[min(GREEDY_BUDGETS)] >= gaps[max(GREEDY_BUDGETS)]

    def test_greedy_respects_budget_per_seed(self, greedy_runs):
        """Test avg transmissions <= gamma_max + 2/T for every seed"""
        for gamma, runs in greedy_runs.items():
            assert len(runs) == len(SEEDS)
            for run in runs:
                assert run.avg_transmissions <= gamma + 2.0 / HORIZON

    def test_high_rates_reach_lower_bound(self, cfg):
        """Test Deter. within 5% of the lower bound at mu=(1,1), gamma_max=2"""
        params = SystemParams(1.0, 1.0, 0.8, 0.7, 2.0)
        deter = bisection_solve(params, cfg).eval_plus.avg_aoi
        runs = simulate_seeds(('builtin', 'lower-bound'), lower_bound_params(params), HORIZON, SEEDS)
        bound = _mean([r.avg_sum_aoi for r in runs])
        assert deter == pytest.approx(bound, rel=0.05)
