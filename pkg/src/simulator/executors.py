"""
Policy executors: per-slot action selection for the simulator
"""
import os
import sys

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.policy_table import PolicyTable
from mdp.model import Action, SystemParams
from simulator.engine import SimState


class PolicyExecutor:
    """Chooses the action of each slot; owns its per-run counters"""

    name = 'executor'

    def reset(self):
        pass

    def select_action(self, state: SimState) -> Action:
        raise NotImplementedError


class IdleExecutor(PolicyExecutor):
    name = 'idle'

    def select_action(self, state: SimState) -> Action:
        return Action(0, 0)


class AlternatingExecutor(PolicyExecutor):
    """Both links serve source 1 on even slots and source 2 on odd slots"""

    name = 'alternate'

    def __init__(self):
        self.slot = 0

    def reset(self):
        self.slot = 0

    def select_action(self, state: SimState) -> Action:
        source = 1 if self.slot % 2 == 0 else 2
        self.slot += 1
        return Action(source, source)


class TableExecutor(PolicyExecutor):
    """Looks up a truncated-MDP policy, clamping each relative coordinate to N"""

    name = 'table'

    def __init__(self, policy: PolicyTable):
        self.policy = policy
        self.side = policy.n + 1
        self.m = self.side ** 3

    def lookup_index(self, state: SimState) -> int:
        n = self.policy.n
        index = 0
        for k in range(2):
            theta = state.theta[k]
            x = state.delta[k] - theta
            y = state.dest[k] - state.delta[k]
            source = (min(theta, n) * self.side + min(x, n)) * self.side + min(y, n)
            index = index * self.m + source
        return index

    def select_action(self, state: SimState) -> Action:
        return Action.from_code(int(self.policy.actions[self.lookup_index(state)]))


class GreedyExecutor(PolicyExecutor):
    """
    Budget-gated greedy benchmark: a link may transmit only if the running
    average including this transmission stays within gamma_max (Tx decided
    first). Tx serves the larger relative AoI at R, the relay the larger
    relative AoI at D; a zero criterion leaves the link idle, ties go to
    source 1.
    """

    name = 'greedy'

    def __init__(self, gamma_max: float):
        if not 0.0 < gamma_max <= 2.0:
            raise ValueError(f"gamma_max must lie in (0, 2], got {gamma_max}")
        self.gamma_max = gamma_max
        self.cum_transmissions = 0
        self.slot = 0

    def reset(self):
        self.cum_transmissions = 0
        self.slot = 0

    def _budget_allows(self, count: int) -> bool:
        return count + 1 <= self.gamma_max * self.slot + 1e-9

    @staticmethod
    def _argmax_source(first: int, second: int) -> int:
        if max(first, second) <= 0:
            return 0
        return 1 if first >= second else 2

    def select_action(self, state: SimState) -> Action:
        self.slot += 1
        count = self.cum_transmissions

        alpha = 0
        if self._budget_allows(count):
            alpha = self._argmax_source(
                state.delta[0] - state.theta[0], state.delta[1] - state.theta[1]
            )
            if alpha:
                count += 1

        beta = 0
        if self._budget_allows(count):
            beta = self._argmax_source(
                state.dest[0] - state.delta[0], state.dest[1] - state.delta[1]
            )
            if beta:
                count += 1

        self.cum_transmissions = count
        return Action(alpha, beta)


def mixing_seed(seed: int) -> np.random.SeedSequence:
    """Child of the run seed, independent of the arrival and channel draws"""
    return np.random.SeedSequence(seed).spawn(1)[0]


class MixingExecutor(PolicyExecutor):
    """One randomization before operation: policy_plus w.p. eta, else policy_minus"""

    name = 'mixed'

    def __init__(self, policy_plus: PolicyTable, policy_minus: PolicyTable, eta: float, seed: int):
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"Mixing factor must lie in [0, 1], got {eta}")
        self.eta = eta
        self.uses_plus = bool(np.random.default_rng(mixing_seed(seed)).random() < eta)
        self.inner = TableExecutor(policy_plus if self.uses_plus else policy_minus)

    def reset(self):
        self.inner.reset()

    def select_action(self, state: SimState) -> Action:
        return self.inner.select_action(state)


BUILTIN_EXECUTORS = ('idle', 'alternate', 'greedy', 'lower-bound')


def lower_bound_params(params: SystemParams) -> SystemParams:
    """Generate-at-will arrivals and no resource constraint, same links"""
    return SystemParams(1.0, 1.0, params.p, params.q, 2.0)


def make_builtin_executor(name: str, params: SystemParams) -> PolicyExecutor:
    if name == 'idle':
        return IdleExecutor()
    if name == 'alternate':
        return AlternatingExecutor()
    if name == 'greedy':
        return GreedyExecutor(params.gamma_max)
    if name == 'lower-bound':
        return GreedyExecutor(2.0)
    raise ValueError(f"Unknown builtin executor {name!r}; choose from {BUILTIN_EXECUTORS}")
