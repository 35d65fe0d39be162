"""
Switching-structure check for the relay decision along y1 / y2

A policy is switching-type in beta along y_i when beta = i at s implies
beta = i at s + z e_{y_i} for every z. Checking each consecutive pair
(y_i, y_i + 1) is equivalent.
"""
import os
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.policy_table import PolicyTable
from mdp.model import Action, State


# position of y_i in (theta1, x1, y1, theta2, x2, y2)
_Y_AXIS = {1: 2, 2: 5}

Violation = Tuple[State, Action, State, Action]


@dataclass
class SwitchingReport:
    axis: str
    violations: List[Violation] = field(default_factory=list)
    checked_pairs: int = 0

    @property
    def is_switching(self) -> bool:
        return not self.violations


def verify_switching(
    policy: PolicyTable,
    include_cap: bool = False,
    strict: bool = False
) -> Dict[str, SwitchingReport]:
    """
    One report per axis ('y1', 'y2'). With include_cap=False, pairs whose
    upper state sits at y_i = N are skipped: that state aggregates every
    untruncated y_i >= N. With strict=True any violation raises ValueError.
    """
    side = policy.n + 1
    shape = (side,) * 6
    beta = policy.beta_array().reshape(shape)
    codes = policy.actions.reshape(shape)
    top = policy.n if include_cap else policy.n - 1

    reports = {}
    for source, axis in _Y_AXIS.items():
        report = SwitchingReport(axis=f"y{source}")
        if top >= 1:
            lower = np.take(beta, np.arange(0, top), axis=axis)
            upper = np.take(beta, np.arange(1, top + 1), axis=axis)
            report.checked_pairs = int((lower == source).sum())
            for idx in np.argwhere((lower == source) & (upper != source)):
                here = tuple(int(v) for v in idx)
                there = list(here)
                there[axis] += 1
                there = tuple(there)
                report.violations.append((
                    State.of(*here), Action.from_code(int(codes[here])),
                    State.of(*there), Action.from_code(int(codes[there]))
                ))
        reports[report.axis] = report

    if strict:
        broken = {axis: len(r.violations) for axis, r in reports.items() if r.violations}
        if broken:
            raise ValueError(f"Policy is not switching-type in beta: violations per axis {broken}")
    return reports
