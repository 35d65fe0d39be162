"""
Policy iteration with exact gain/bias evaluation (small N)
"""
import logging
import os
import sys
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.policy_table import PolicyTable
from mdp.kernel import FactoredKernel
from mdp.model import SystemParams
from mdp.state_space import state_index
from solver.errors import ConvergenceError
from solver.rvi import RviSolution, SolverConfig, q_values


logger = logging.getLogger('RelayAoI.solver')


def evaluate_gain_bias(
    kernel: FactoredKernel,
    codes: np.ndarray,
    lam: float,
    ref: int
) -> Tuple[float, np.ndarray]:
    """Solve g + h = L_pi + P_pi h with h(ref) = 0"""
    codes = np.asarray(codes).ravel()
    size = kernel.num_states
    costs = kernel.aoi_grid.ravel() + lam * kernel.transmission_costs[codes]

    system = (sp.identity(size, format='csr') - kernel.policy_matrix(codes)).tolil()
    # column of h(ref) is reused for the unknown gain
    system[:, ref] = np.ones((size, 1))
    solution = spla.spsolve(system.tocsc(), costs)
    if not np.all(np.isfinite(solution)):
        raise RuntimeError("Gain/bias system is singular; the induced chain is not unichain")

    gain = float(solution[ref])
    bias = solution.copy()
    bias[ref] = 0.0
    return gain, bias


def policy_iteration_solve(
    params: SystemParams,
    cfg: SolverConfig,
    lam: float,
    kernel: Optional[FactoredKernel] = None,
    max_iters: int = 1000
) -> RviSolution:
    if lam < 0:
        raise ValueError(f"Lagrange multiplier must be nonnegative, got {lam}")
    if kernel is None:
        kernel = FactoredKernel(params, cfg.n)
    if kernel.num_states > cfg.direct_max_states:
        raise ValueError(
            f"Policy iteration needs full matrices; {kernel.num_states} states exceeds "
            f"direct_max_states={cfg.direct_max_states}"
        )

    m = kernel.m
    ref = state_index(cfg.ref_state, cfg.n)
    codes = np.zeros(kernel.num_states, dtype=np.int8)

    for iteration in range(1, max_iters + 1):
        gain, bias = evaluate_gain_bias(kernel, codes, lam, ref)
        q = q_values(kernel, bias.reshape(m, m), lam).reshape(9, -1)

        best = q.min(axis=0)
        incumbent = q[codes.astype(np.intp), np.arange(codes.size)]
        improved = incumbent > best + cfg.tie_tol
        if not improved.any():
            logger.debug(f"Policy iteration lambda={lam:.4f} stable after {iteration} rounds")
            policy = PolicyTable(cfg.n, codes, lambda_value=lam, params_hash=params.params_hash())
            return RviSolution(policy, gain, bias, iteration, 0.0, lam)

        first_best = np.argmax(q <= best[None, :] + cfg.tie_tol, axis=0).astype(np.int8)
        codes = np.where(improved, first_best, codes).astype(np.int8)

    raise ConvergenceError(f"Policy iteration did not stabilise for lambda={lam}", max_iters, float('nan'))
