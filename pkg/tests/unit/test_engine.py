"""
Tests for the slot-level simulator
"""
import pytest

from mdp.model import Action, SourceState, SystemParams
from simulator.engine import SimState, StepOutcome, run_simulation, sim_step
from simulator.executors import AlternatingExecutor, IdleExecutor


pytestmark = pytest.mark.unit


class TestSimStep:
    """Test cases for sim_step"""

    def test_successful_relay_and_tx(self):
        """Test the age recursions on one source"""
        state = SimState(theta=(1, 0), delta=(3, 0), dest=(7, 0))
        outcome = StepOutcome((False, True), True, True)
        nxt = sim_step(state, Action(1, 1), outcome)
        assert (nxt.theta[0], nxt.delta[0], nxt.dest[0]) == (2, 2, 4)
        assert (nxt.theta[1], nxt.delta[1], nxt.dest[1]) == (0, 1, 1)

    def test_counters(self):
        """Test cumulative transmissions and AoI"""
        state = SimState()
        nxt = sim_step(state, Action(2, 0), StepOutcome((False, False), False, False))
        assert nxt.cum_transmissions == 1
        assert nxt.cum_aoi == (1, 1)
        assert nxt.cum_aoi_sum == 2
        assert nxt.t == 1

    def test_failed_links_change_nothing(self):
        """Test that failed transmissions age like idle links"""
        state = SimState(theta=(1, 1), delta=(3, 3), dest=(7, 7))
        outcome = StepOutcome((False, False), False, False)
        served = sim_step(state, Action(1, 1), outcome)
        idle = sim_step(state, Action(0, 0), outcome)
        assert (served.theta, served.delta, served.dest) == (idle.theta, idle.delta, idle.dest)

    def test_age_cap(self):
        """Test clamping of absolute ages"""
        state = SimState(theta=(7, 7), delta=(7, 7), dest=(7, 7))
        nxt = sim_step(state, Action(0, 0), StepOutcome((False, False), False, False), age_cap=7)
        assert nxt.dest == (7, 7)
        assert nxt.relative(1) == SourceState(7, 0, 0)


class TestRunSimulation:
    """Test cases for run_simulation"""

    def test_alternating_orbit(self):
        """Test the closed-form average of alternating service over reliable links"""
        params = SystemParams(1.0, 1.0, 1.0, 1.0, 2.0)
        for horizon in (3, 10, 101):
            metrics = run_simulation(AlternatingExecutor(), params, horizon, seed=0)
            assert metrics.avg_sum_aoi == pytest.approx(7 - 9 / horizon)
            assert metrics.avg_transmissions == pytest.approx(2.0)

    def test_deterministic_per_seed(self):
        """Test that a seed fixes the whole run"""
        params = SystemParams(0.6, 0.9, 0.8, 0.7, 1.6)
        first = run_simulation(AlternatingExecutor(), params, 500, seed=7)
        second = run_simulation(AlternatingExecutor(), params, 500, seed=7)
        assert first == second

    def test_per_source_sums(self):
        """Test that per-source averages add up to the sum AoI"""
        params = SystemParams(0.6, 0.9, 0.8, 0.7, 1.6)
        metrics = run_simulation(AlternatingExecutor(), params, 1000, seed=3)
        assert sum(metrics.per_source_aoi) == pytest.approx(metrics.avg_sum_aoi)

    def test_idle_grows_without_bound(self):
        """Test the growth flag for an executor that never transmits"""
        params = SystemParams(0.6, 0.9, 0.8, 0.7, 1.6)
        metrics = run_simulation(IdleExecutor(), params, 1000, seed=1)
        assert metrics.avg_transmissions == 0.0
        assert metrics.unbounded_trend
        assert metrics.second_half_aoi > metrics.first_half_aoi

    def test_growth_warning_names_executor(self, caplog):
        """Test that the growth warning names the executor"""
        params = SystemParams(0.6, 0.9, 0.8, 0.7, 1.6)
        with caplog.at_level('WARNING', logger='RelayAoI.simulator'):
            run_simulation(IdleExecutor(), params, 1000, seed=1)
        assert any('idle executor' in record.getMessage() for record in caplog.records)

    def test_idle_with_cap_is_bounded(self):
        """Test that the capped system settles at the cap"""
        params = SystemParams(0.6, 0.9, 0.8, 0.7, 1.6)
        metrics = run_simulation(IdleExecutor(), params, 1000, seed=1, age_cap=7)
        assert not metrics.unbounded_trend
        assert metrics.avg_sum_aoi <= 14.0

    def test_invalid_horizon(self):
        """Test rejection of an empty run"""
        with pytest.raises(ValueError):
            run_simulation(IdleExecutor(), SystemParams(0.5, 0.5, 0.5, 0.5), 0, seed=1)
