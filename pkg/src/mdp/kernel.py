"""
Truncated transition kernel of the relay CMDP

The per-source kernel enumerates the arrival / Tx-success / relay-success
outcomes of a slot, advances the absolute ages (theta, delta, Delta), clamps
each to N and converts back to relative coordinates. Clamping is monotone, so
theta' <= delta' <= Delta' and the relative coordinates stay nonnegative.
"""
import os
import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np
import scipy.sparse as sp

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from mdp.model import (
    Action, SourceState, State, SystemParams, ALL_ACTIONS,
    check_truncation, transmission_cost
)
from mdp.state_space import num_source_states, source_index, source_state_at


@dataclass
class TransitionDist:
    """Distribution over distinct next states"""
    entries: List[Tuple[State, float]]

    def total(self) -> float:
        return sum(prob for _, prob in self.entries)

    def as_dict(self) -> Dict[State, float]:
        return dict(self.entries)


def next_absolute_ages(
    theta: int,
    delta: int,
    dest: int,
    arrived: bool,
    tx_ok: bool,
    relay_ok: bool
) -> Tuple[int, int, int]:
    """One slot of the age recursions, all right-hand sides at slot t"""
    dest_next = delta + 1 if relay_ok else dest + 1
    delta_next = theta + 1 if tx_ok else delta + 1
    theta_next = 0 if arrived else theta + 1
    return theta_next, delta_next, dest_next


def _check_probabilities(**probs: float):
    for name, value in probs.items():
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must be a probability in [0, 1], got {value}")


def source_transitions(
    src: SourceState,
    scheduled_tx: bool,
    scheduled_relay: bool,
    arrival_rate: float,
    p: float,
    q: float,
    n: int
) -> List[Tuple[SourceState, float]]:
    """
    Next-state distribution of one source

    A link that serves this source branches on success/failure; a link that
    does not is deterministic. Zero-probability outcomes are dropped and
    outcomes that truncate to the same state are merged.
    """
    _check_probabilities(arrival_rate=arrival_rate, p=p, q=q)
    n = check_truncation(n)
    source_index(src, n)

    tx_branches = [(True, p), (False, 1.0 - p)] if scheduled_tx else [(False, 1.0)]
    relay_branches = [(True, q), (False, 1.0 - q)] if scheduled_relay else [(False, 1.0)]
    arrival_branches = [(True, arrival_rate), (False, 1.0 - arrival_rate)]

    theta, delta, dest = src.theta, src.delta, src.dest
    merged: Dict[SourceState, float] = {}
    for arrived, p_arrival in arrival_branches:
        for tx_ok, p_tx in tx_branches:
            for relay_ok, p_relay in relay_branches:
                prob = p_arrival * p_tx * p_relay
                if prob == 0.0:
                    continue
                t_next, d_next, D_next = next_absolute_ages(
                    theta, delta, dest, arrived, tx_ok, relay_ok
                )
                nxt = SourceState.from_absolute(min(t_next, n), min(d_next, n), min(D_next, n))
                merged[nxt] = merged.get(nxt, 0.0) + prob

    return list(merged.items())


def joint_transitions(state: State, action: Action, params: SystemParams, n: int) -> TransitionDist:
    """Product of the two per-source distributions"""
    per_source = []
    for i, src, rate in ((1, state.s1, params.mu1), (2, state.s2, params.mu2)):
        tx, relay = action.serves(i)
        per_source.append(source_transitions(src, tx, relay, rate, params.p, params.q, n))

    entries = []
    for s1, p1 in per_source[0]:
        for s2, p2 in per_source[1]:
            entries.append((State(s1, s2), p1 * p2))
    return TransitionDist(entries)


@lru_cache(maxsize=64)
def source_kernel_matrix(
    arrival_rate: float,
    p: float,
    q: float,
    n: int,
    scheduled_tx: bool,
    scheduled_relay: bool
) -> sp.csr_matrix:
    """Per-source kernel as a sparse (N+1)^3 x (N+1)^3 matrix"""
    m = num_source_states(n)
    rows, cols, vals = [], [], []
    for i in range(m):
        src = source_state_at(i, n)
        for nxt, prob in source_transitions(
            src, scheduled_tx, scheduled_relay, arrival_rate, p, q, n
        ):
            rows.append(i)
            cols.append(source_index(nxt, n))
            vals.append(prob)
    return sp.csr_matrix((vals, (rows, cols)), shape=(m, m))


class FactoredKernel:
    """
    Joint kernel kept in factored form

    Value arrays over the joint space are handled as (N+1)^3 x (N+1)^3
    matrices H[i1, i2]; the joint index i1 * (N+1)^3 + i2 matches the
    row-major state ordering, so H.ravel() is the flat state vector.
    """

    def __init__(self, params: SystemParams, n: int):
        self.params = params
        self.n = check_truncation(n)
        self.m = num_source_states(n)

        self._forward: Dict[Tuple[int, bool, bool], sp.csr_matrix] = {}
        self._backward: Dict[Tuple[int, bool, bool], sp.csr_matrix] = {}
        for i, rate in ((1, params.mu1), (2, params.mu2)):
            for tx in (False, True):
                for relay in (False, True):
                    mat = source_kernel_matrix(rate, params.p, params.q, self.n, tx, relay)
                    self._forward[(i, tx, relay)] = mat
                    self._backward[(i, tx, relay)] = mat.T.tocsr()

        source_costs = np.array(
            [source_state_at(i, self.n).cost() for i in range(self.m)], dtype=float
        )
        self.source_costs = source_costs
        self.aoi_grid = source_costs[:, None] + source_costs[None, :]
        self.transmission_costs = np.array(
            [transmission_cost(a) for a in ALL_ACTIONS], dtype=float
        )

    @property
    def num_states(self) -> int:
        return self.m * self.m

    def _pair(self, action: Action, table: Dict) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
        tx1, relay1 = action.serves(1)
        tx2, relay2 = action.serves(2)
        return table[(1, tx1, relay1)], table[(2, tx2, relay2)]

    def expected_value(self, values: np.ndarray, action: Action) -> np.ndarray:
        """E[h(s') | s, a] for every s, returned on the (m, m) grid"""
        k1, k2 = self._pair(action, self._forward)
        left = k1 @ values
        return np.asarray((k2 @ left.T).T)

    def expected_values(self, values: np.ndarray) -> np.ndarray:
        """expected_value for all nine actions, shape (9, m, m)"""
        out = np.empty((len(ALL_ACTIONS), self.m, self.m))
        left: Dict[Tuple[int, bool, bool], np.ndarray] = {}
        for action in ALL_ACTIONS:
            key1 = (1,) + action.serves(1)
            if key1 not in left:
                left[key1] = self._forward[key1] @ values
            k2 = self._forward[(2,) + action.serves(2)]
            out[action.code] = (k2 @ left[key1].T).T
        return out

    def push_forward(self, dist: np.ndarray, action: Action) -> np.ndarray:
        """Mass reached in one step from a distribution on the (m, m) grid"""
        k1t, k2t = self._pair(action, self._backward)
        left = k1t @ dist
        return np.asarray((k2t @ left.T).T)

    def joint_matrix(self, action: Action) -> sp.csr_matrix:
        """Full S x S matrix for one action (small N only)"""
        k1, k2 = self._pair(action, self._forward)
        return sp.kron(k1, k2, format='csr')

    def policy_matrix(self, codes: np.ndarray) -> sp.csr_matrix:
        """Transition matrix of the chain induced by a flat action-code array"""
        codes = np.asarray(codes).ravel()
        total = None
        for action in ALL_ACTIONS:
            mask = (codes == action.code)
            if not mask.any():
                continue
            part = sp.diags(mask.astype(float)) @ self.joint_matrix(action)
            total = part if total is None else total + part
        return total.tocsr()
