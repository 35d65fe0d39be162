"""
Lagrange multiplier bisection and policy mixing for the constrained problem
"""
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.policy_table import PolicyTable
from mdp.kernel import FactoredKernel
from mdp.model import SystemParams
from solver.evaluation import PolicyEvaluation, evaluate_policy_exact
from solver.rvi import RviSolution, SolverConfig, rvi_solve


logger = logging.getLogger('RelayAoI.solver')


@dataclass
class BisectionStep:
    """One lambda step of the outer loop"""
    lambda_value: float
    avg_transmissions: float
    avg_aoi: float
    gain: float
    rvi_iterations: int
    branch: str


@dataclass
class CmdpSolution:
    lambda_minus: float
    lambda_plus: float
    policy_minus: PolicyTable
    policy_plus: PolicyTable
    eval_minus: PolicyEvaluation
    eval_plus: PolicyEvaluation
    eta: float
    j_mix: float
    gain_minus: float
    gain_plus: float
    dual_bound: float
    constraint_slack: bool
    trace: List[BisectionStep] = field(default_factory=list)

    @property
    def rvi_iterations(self) -> int:
        return sum(step.rvi_iterations for step in self.trace)


def mixing_factor(d_minus: float, d_plus: float, gamma_max: float, tol: float = 1e-12) -> float:
    """
    eta = (Gamma - D(pi_minus)) / (D(pi_plus) - D(pi_minus)), clamped to [0, 1];
    1 when both endpoints spend the same budget
    """
    if d_plus > gamma_max + tol or gamma_max > d_minus + tol:
        raise ValueError(
            f"Need D(pi_plus) <= gamma_max <= D(pi_minus), got "
            f"{d_plus} <= {gamma_max} <= {d_minus}"
        )
    if abs(d_minus - d_plus) <= tol:
        return 1.0
    eta = (gamma_max - d_minus) / (d_plus - d_minus)
    return min(1.0, max(0.0, eta))


def mixed_value(j_minus: float, j_plus: float, eta: float) -> float:
    """J_mix = eta * J(pi_plus) + (1 - eta) * J(pi_minus)"""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"Mixing factor must lie in [0, 1], got {eta}")
    return eta * j_plus + (1.0 - eta) * j_minus


def bisection_solve(
    params: SystemParams,
    cfg: SolverConfig,
    kernel: Optional[FactoredKernel] = None
) -> CmdpSolution:
    """
    Bisect on lambda until lambda_plus - lambda_minus < zeta, routing
    D(pi_bis) >= gamma_max to the lower end, then mix the two endpoint policies.
    """
    gamma = params.gamma_max
    if kernel is None:
        kernel = FactoredKernel(params, cfg.n)
    trace: List[BisectionStep] = []

    def solve_at(lam: float) -> Tuple[RviSolution, PolicyEvaluation]:
        solution = rvi_solve(params, cfg, lam, kernel)
        evaluation = evaluate_policy_exact(
            solution.policy, params, cfg.n, kernel,
            direct_max_states=cfg.direct_max_states,
            tol=cfg.eval_tol,
            max_iters=cfg.max_eval_iters
        )
        branch = 'minus' if evaluation.avg_transmissions >= gamma else 'plus'
        trace.append(BisectionStep(
            lam, evaluation.avg_transmissions, evaluation.avg_aoi,
            solution.gain, solution.iterations, branch
        ))
        logger.info(
            f"lambda={lam:.6f}: D={evaluation.avg_transmissions:.4f}, "
            f"J={evaluation.avg_aoi:.4f} ({solution.iterations} RVI iterations)"
        )
        return solution, evaluation

    lam_minus = cfg.lambda_minus_init
    sol_minus, ev_minus = solve_at(lam_minus)
    if ev_minus.avg_transmissions <= gamma:
        logger.info(f"Constraint slack at lambda={lam_minus}: D={ev_minus.avg_transmissions:.4f}")
        return CmdpSolution(
            lambda_minus=lam_minus,
            lambda_plus=lam_minus,
            policy_minus=sol_minus.policy,
            policy_plus=sol_minus.policy,
            eval_minus=ev_minus,
            eval_plus=ev_minus,
            eta=1.0,
            j_mix=ev_minus.avg_aoi,
            gain_minus=sol_minus.gain,
            gain_plus=sol_minus.gain,
            dual_bound=sol_minus.gain - lam_minus * gamma,
            constraint_slack=True,
            trace=trace
        )

    lam_plus = cfg.lambda_plus_init
    sol_plus, ev_plus = solve_at(lam_plus)
    doublings = 0
    while ev_plus.avg_transmissions > gamma:
        if doublings >= cfg.max_lambda_doublings:
            raise RuntimeError(
                f"No feasible lambda found after {doublings} doublings "
                f"(lambda={lam_plus}, D={ev_plus.avg_transmissions:.4f} > {gamma})"
            )
        # an infeasible upper endpoint is a valid lower bracket
        lam_minus, sol_minus, ev_minus = lam_plus, sol_plus, ev_plus
        lam_plus *= 2.0
        doublings += 1
        sol_plus, ev_plus = solve_at(lam_plus)

    while lam_plus - lam_minus >= cfg.zeta:
        lam_bis = 0.5 * (lam_plus + lam_minus)
        solution, evaluation = solve_at(lam_bis)
        if evaluation.avg_transmissions >= gamma:
            lam_minus, sol_minus, ev_minus = lam_bis, solution, evaluation
        else:
            lam_plus, sol_plus, ev_plus = lam_bis, solution, evaluation

    eta = mixing_factor(ev_minus.avg_transmissions, ev_plus.avg_transmissions, gamma)
    j_mix = mixed_value(ev_minus.avg_aoi, ev_plus.avg_aoi, eta)
    dual_bound = max(
        sol_plus.gain - lam_plus * gamma,
        sol_minus.gain - lam_minus * gamma
    )

    return CmdpSolution(
        lambda_minus=lam_minus,
        lambda_plus=lam_plus,
        policy_minus=sol_minus.policy,
        policy_plus=sol_plus.policy,
        eval_minus=ev_minus,
        eval_plus=ev_plus,
        eta=eta,
        j_mix=j_mix,
        gain_minus=sol_minus.gain,
        gain_plus=sol_plus.gain,
        dual_bound=dual_bound,
        constraint_slack=False,
        trace=trace
    )
