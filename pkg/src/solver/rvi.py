"""
Relative value iteration for the lambda-parameterized average-cost MDP
"""
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.policy_table import PolicyTable
from mdp.kernel import FactoredKernel
from mdp.model import State, SystemParams, check_truncation
from mdp.state_space import num_source_states, state_index
from solver.errors import ConvergenceError


logger = logging.getLogger('RelayAoI.solver')


@dataclass
class SolverConfig:
    """Inputs of the policy design loop plus numerical knobs"""
    n: int = 7
    epsilon: float = 0.001
    zeta: float = 0.01
    lambda_minus_init: float = 0.0
    lambda_plus_init: float = 1000.0
    max_rvi_iters: int = 100000
    ref_state: State = field(default_factory=lambda: State.of(0, 0, 0, 0, 0, 0))
    aperiodicity: float = 1.0
    max_lambda_doublings: int = 20
    direct_max_states: int = 5000
    eval_tol: float = 1e-12
    max_eval_iters: int = 200000
    tie_tol: float = 1e-9

    def __post_init__(self):
        self.n = check_truncation(self.n)
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.zeta <= 0:
            raise ValueError(f"zeta must be positive, got {self.zeta}")
        if self.lambda_minus_init < 0:
            raise ValueError(f"lambda_minus_init must be nonnegative, got {self.lambda_minus_init}")
        if not self.lambda_minus_init < self.lambda_plus_init:
            raise ValueError("lambda_minus_init must be smaller than lambda_plus_init")
        if self.max_rvi_iters < 1:
            raise ValueError("max_rvi_iters must be positive")
        if not 0.0 < self.aperiodicity <= 1.0:
            raise ValueError(f"aperiodicity must lie in (0, 1], got {self.aperiodicity}")
        state_index(self.ref_state, self.n)


@dataclass
class RviSolution:
    """Greedy policy, gain and relative values (flat, indexed by state)"""
    policy: PolicyTable
    gain: float
    h: np.ndarray
    iterations: int
    residual: float
    lambda_value: float


def q_values(
    kernel: FactoredKernel,
    h_grid: np.ndarray,
    lam: float,
    aperiodicity: float = 1.0
) -> np.ndarray:
    """L(s, a; lambda) + E[h(s')] for all actions, shape (9, m, m)"""
    expected = kernel.expected_values(h_grid)
    if aperiodicity != 1.0:
        expected = aperiodicity * expected + (1.0 - aperiodicity) * h_grid[None, :, :]
    penalty = lam * kernel.transmission_costs
    return kernel.aoi_grid[None, :, :] + penalty[:, None, None] + expected


def greedy_codes(q: np.ndarray, tie_tol: float = 1e-9) -> np.ndarray:
    """Lowest action code among the near-minimal ones (idle wins ties)"""
    best = q.min(axis=0)
    return np.argmax(q <= best[None, :, :] + tie_tol, axis=0).astype(np.int8)


def rvi_solve(
    params: SystemParams,
    cfg: SolverConfig,
    lam: float,
    kernel: Optional[FactoredKernel] = None
) -> RviSolution:
    """
    Iterate V_{n+1}(s) = min_a { L(s,a;lambda) + E[h_n(s')] } with
    h_n = V_n - V_n(s_ref), replacing h only after a full sweep, until the
    sup-norm change of h is at most epsilon.
    """
    if lam < 0:
        raise ValueError(f"Lagrange multiplier must be nonnegative, got {lam}")
    if kernel is None:
        kernel = FactoredKernel(params, cfg.n)
    elif kernel.n != cfg.n:
        raise ValueError(f"Kernel built for N={kernel.n}, config has N={cfg.n}")

    m = num_source_states(cfg.n)
    ref = divmod(state_index(cfg.ref_state, cfg.n), m)

    h = np.zeros((m, m))
    residual = float('inf')
    iterations = 0
    while residual > cfg.epsilon:
        if iterations >= cfg.max_rvi_iters:
            raise ConvergenceError(
                f"RVI did not converge for lambda={lam}", iterations, residual
            )
        v = q_values(kernel, h, lam, cfg.aperiodicity).min(axis=0)
        h_next = v - v[ref]
        residual = float(np.abs(h_next - h).max())
        h = h_next
        iterations += 1
        if iterations % 100 == 0:
            logger.debug(f"RVI lambda={lam:.4f} iteration {iterations}: residual {residual:.3e}")

    q = q_values(kernel, h, lam, cfg.aperiodicity)
    codes = greedy_codes(q, cfg.tie_tol)
    gain = float(q.min(axis=0)[ref])

    logger.debug(
        f"RVI lambda={lam:.4f} converged in {iterations} iterations, gain {gain:.6f}"
    )
    policy = PolicyTable(cfg.n, codes, lambda_value=lam, params_hash=params.params_hash())
    return RviSolution(policy, gain, h.ravel(), iterations, residual, lam)


def bellman_residual(
    solution: RviSolution,
    kernel: FactoredKernel,
    cfg: SolverConfig
) -> float:
    """max_s [Q(s, pi(s)) - min_a Q(s, a)] under the solution's relative values"""
    m = kernel.m
    q = q_values(kernel, solution.h.reshape(m, m), solution.lambda_value, cfg.aperiodicity)
    codes = solution.policy.code_grid().astype(np.intp)
    chosen = np.take_along_axis(q, codes[None, :, :], axis=0)[0]
    return float((chosen - q.min(axis=0)).max())
