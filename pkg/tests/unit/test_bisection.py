"""
Tests for the multiplier bisection and policy mixing
"""
import pytest

from mdp.kernel import FactoredKernel
from mdp.model import SystemParams
from solver.bisection import bisection_solve, mixed_value, mixing_factor
from solver.rvi import SolverConfig


pytestmark = pytest.mark.unit


class TestMixing:
    """Test cases for mixing_factor and mixed_value"""

    def test_mixing_factor(self):
        """Test the interpolation and its endpoints"""
        assert mixing_factor(1.7, 1.5, 1.6) == pytest.approx(0.5)
        assert mixing_factor(1.6, 1.5, 1.6) == pytest.approx(0.0)
        assert mixing_factor(1.7, 1.6, 1.6) == pytest.approx(1.0)

    def test_equal_endpoints(self):
        """Test that identical budgets use the upper policy only"""
        assert mixing_factor(1.8, 1.8, 1.8) == 1.0

    def test_unbracketed_budget(self):
        """Test rejection when gamma_max is not bracketed"""
        with pytest.raises(ValueError):
            mixing_factor(1.5, 1.7, 1.6)
        with pytest.raises(ValueError):
            mixing_factor(1.4, 1.2, 1.6)

    def test_mixed_value(self):
        """Test the convex combination of costs"""
        assert mixed_value(18.0, 20.0, 0.5) == pytest.approx(19.0)
        assert mixed_value(18.0, 20.0, 1.0) == pytest.approx(20.0)
        with pytest.raises(ValueError):
            mixed_value(18.0, 20.0, 1.5)


class TestBisectionSolve:
    """Test cases for bisection_solve at small N"""

    @pytest.fixture
    def kernel(self):
        """Create kernel fixture; the kernel does not depend on gamma_max"""
        return FactoredKernel(SystemParams(0.6, 0.9, 0.8, 0.7), 2)

    def test_contract(self, kernel):
        """Test bracket width, feasibility split and the mixed budget"""
        params = SystemParams(0.6, 0.9, 0.8, 0.7, 1.0)
        cfg = SolverConfig(n=2, epsilon=1e-8)
        solution = bisection_solve(params, cfg, kernel)

        assert not solution.constraint_slack
        assert solution.lambda_plus - solution.lambda_minus < cfg.zeta
        assert solution.eval_plus.avg_transmissions <= params.gamma_max
        assert solution.eval_minus.avg_transmissions >= params.gamma_max
        assert 0.0 <= solution.eta <= 1.0
        mixed_budget = (
            solution.eta * solution.eval_plus.avg_transmissions
            + (1 - solution.eta) * solution.eval_minus.avg_transmissions
        )
        assert mixed_budget == pytest.approx(params.gamma_max, abs=1e-9)
        assert solution.j_mix <= solution.eval_plus.avg_aoi + 1e-6
        assert solution.dual_bound <= solution.j_mix + 1e-2

    def test_trace_records_every_step(self, kernel):
        """Test that the trace covers both initial endpoints and every bisection step"""
        params = SystemParams(0.6, 0.9, 0.8, 0.7, 1.0)
        solution = bisection_solve(params, SolverConfig(n=2), kernel)
        assert solution.trace[0].lambda_value == 0.0
        assert solution.trace[1].lambda_value == 1000.0
        assert {step.branch for step in solution.trace} <= {'minus', 'plus'}
        assert solution.rvi_iterations == sum(s.rvi_iterations for s in solution.trace)

    def test_constraint_slack(self, kernel):
        """Test that a full budget stops at lambda=0 with eta=1"""
        params = SystemParams(0.6, 0.9, 0.8, 0.7, 2.0)
        solution = bisection_solve(params, SolverConfig(n=2), kernel)
        assert solution.constraint_slack
        assert solution.eta == 1.0
        assert solution.lambda_minus == solution.lambda_plus == 0.0
        assert len(solution.trace) == 1
        assert solution.j_mix == pytest.approx(solution.eval_plus.avg_aoi)

    def test_doubling_raises_lower_end(self, kernel):
        """Test that an infeasible upper endpoint becomes the new lambda_minus"""
        params = SystemParams(0.6, 0.9, 0.8, 0.7, 0.5)
        cfg = SolverConfig(n=2, lambda_plus_init=0.01)
        solution = bisection_solve(params, cfg, kernel)
        assert solution.trace[1].branch == 'minus'
        assert solution.lambda_minus >= 0.01
        assert solution.eval_plus.avg_transmissions <= params.gamma_max

    def test_doubling_budget_exhausted(self, kernel):
        """Test failure when no feasible lambda is reached"""
        params = SystemParams(0.6, 0.9, 0.8, 0.7, 0.5)
        cfg = SolverConfig(n=2, lambda_plus_init=0.01, max_lambda_doublings=0)
        with pytest.raises(RuntimeError):
            bisection_solve(params, cfg, kernel)
