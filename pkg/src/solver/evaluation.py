"""
Exact evaluation of a stationary deterministic policy on the truncated chain
"""
import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.policy_table import PolicyTable
from mdp.kernel import FactoredKernel
from mdp.model import ALL_ACTIONS, SystemParams
from solver.errors import ConvergenceError


logger = logging.getLogger('RelayAoI.solver')

# P~ = LAZINESS * P + (1 - LAZINESS) * I has the same stationary law and is aperiodic
LAZINESS = 0.9


@dataclass
class PolicyEvaluation:
    """Long-run averages under the stationary distribution"""
    avg_aoi: float
    avg_transmissions: float
    stationary: np.ndarray
    per_source_aoi: Tuple[float, float]
    method: str = 'power'
    iterations: int = 0


def _stationary_direct(kernel: FactoredKernel, codes: np.ndarray) -> np.ndarray:
    size = kernel.num_states
    system = (kernel.policy_matrix(codes).T - sp.identity(size, format='csr')).tolil()
    system[0, :] = np.ones((1, size))
    rhs = np.zeros(size)
    rhs[0] = 1.0
    dist = spla.spsolve(system.tocsc(), rhs)
    if not np.all(np.isfinite(dist)):
        raise RuntimeError("Stationary system is singular; the induced chain is not unichain")
    dist = np.where(dist < 0.0, 0.0, dist)
    return dist / dist.sum()


def _stationary_power(
    kernel: FactoredKernel,
    code_grid: np.ndarray,
    tol: float,
    max_iters: int
) -> Tuple[np.ndarray, int]:
    masks = [(a, code_grid == a.code) for a in ALL_ACTIONS]
    masks = [(a, mask) for a, mask in masks if mask.any()]

    # start from the all-zero state, where the simulator starts too
    dist = np.zeros((kernel.m, kernel.m))
    dist[0, 0] = 1.0

    change = float('inf')
    for iteration in range(1, max_iters + 1):
        stepped = np.zeros_like(dist)
        for action, mask in masks:
            stepped += kernel.push_forward(dist * mask, action)
        stepped = LAZINESS * stepped + (1.0 - LAZINESS) * dist
        stepped /= stepped.sum()
        change = float(np.abs(stepped - dist).max())
        dist = stepped
        if change <= tol:
            return dist.ravel(), iteration

    raise ConvergenceError("Stationary power iteration did not converge", max_iters, change)


def evaluate_policy_exact(
    policy: PolicyTable,
    params: SystemParams,
    n: Optional[int] = None,
    kernel: Optional[FactoredKernel] = None,
    direct_max_states: int = 5000,
    tol: float = 1e-12,
    max_iters: int = 200000
) -> PolicyEvaluation:
    """
    J = sum_s pi(s) C(s) and D = sum_s pi(s) D(policy(s)) for the stationary
    distribution pi of the induced chain
    """
    n = policy.n if n is None else n
    if n != policy.n:
        raise ValueError(f"Policy is for N={policy.n}, evaluation requested at N={n}")
    if kernel is None:
        kernel = FactoredKernel(params, n)
    elif kernel.n != n:
        raise ValueError(f"Kernel built for N={kernel.n}, evaluation requested at N={n}")

    if kernel.num_states <= direct_max_states:
        stationary = _stationary_direct(kernel, policy.actions)
        method, iterations = 'direct', 0
    else:
        stationary, iterations = _stationary_power(kernel, policy.code_grid(), tol, max_iters)
        method = 'power'

    grid = stationary.reshape(kernel.m, kernel.m)
    avg_aoi = float((grid * kernel.aoi_grid).sum())
    avg_tx = float((stationary * kernel.transmission_costs[policy.actions]).sum())
    per_source = (
        float(grid.sum(axis=1) @ kernel.source_costs),
        float(grid.sum(axis=0) @ kernel.source_costs)
    )

    logger.debug(
        f"Policy evaluation ({method}, {iterations} iterations): J={avg_aoi:.6f}, D={avg_tx:.6f}"
    )
    return PolicyEvaluation(avg_aoi, avg_tx, stationary, per_source, method, iterations)
