"""
Tests for the switching-structure check
"""
import numpy as np
import pytest

from analysis.policy_table import PolicyTable, idle_policy
from analysis.switching import verify_switching
from mdp.model import Action, State


pytestmark = pytest.mark.unit


def policy_from_beta(n, beta_of):
    """Build a policy with alpha=0 and beta given by a function of the six coordinates"""
    coords = np.indices((n + 1,) * 6).reshape(6, -1)
    beta = beta_of(*coords)
    return PolicyTable(n, np.asarray(beta, dtype=np.int8))


class TestVerifySwitching:
    """Test cases for verify_switching"""

    def test_idle_policy_is_switching(self):
        """Test that a policy that never relays passes vacuously"""
        reports = verify_switching(idle_policy(2))
        assert set(reports) == {'y1', 'y2'}
        assert all(r.is_switching for r in reports.values())
        assert reports['y1'].checked_pairs == 0

    def test_threshold_policy(self):
        """Test that serving the larger y is switching-type on both axes"""
        policy = policy_from_beta(
            3, lambda t1, x1, y1, t2, x2, y2: np.where(y1 >= y2, np.where(y1 > 0, 1, 0), 2)
        )
        reports = verify_switching(policy, include_cap=True)
        assert reports['y1'].is_switching
        assert reports['y2'].is_switching
        assert reports['y1'].checked_pairs > 0

    def test_detects_violation(self):
        """Test a policy that serves source 1 only at y1=0"""
        policy = policy_from_beta(2, lambda t1, x1, y1, t2, x2, y2: np.where(y1 == 0, 1, 0))
        report = verify_switching(policy)['y1']
        assert not report.is_switching
        assert len(report.violations) == 3 ** 5
        here, action, there, other = report.violations[0]
        assert here == State.of(0, 0, 0, 0, 0, 0)
        assert action == Action(0, 1)
        assert there == State.of(0, 0, 1, 0, 0, 0)
        assert other == Action(0, 0)

    def test_cap_pairs_skipped_by_default(self):
        """Test that a drop at y1=N only shows up with include_cap"""
        policy = policy_from_beta(2, lambda t1, x1, y1, t2, x2, y2: np.where(y1 <= 1, 1, 0))
        assert verify_switching(policy)['y1'].is_switching
        assert len(verify_switching(policy, include_cap=True)['y1'].violations) == 3 ** 5

    def test_strict_raises(self):
        """Test that strict mode turns violations into an error"""
        policy = policy_from_beta(2, lambda t1, x1, y1, t2, x2, y2: np.where(y2 == 0, 2, 0))
        with pytest.raises(ValueError):
            verify_switching(policy, strict=True)
