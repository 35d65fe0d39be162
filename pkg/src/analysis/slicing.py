"""
Two-dimensional slices of a policy table
"""
import os
import sys
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
import pandas as pd

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.policy_table import PolicyTable


COORDINATES = ('theta1', 'x1', 'y1', 'theta2', 'x2', 'y2')
# grouped ordering used in figure captions
DISPLAY_ORDER = ('theta1', 'theta2', 'x1', 'x2', 'y1', 'y2')


@dataclass
class PolicySlice:
    component: str
    fixed: Dict[str, int]
    free_axes: Tuple[str, str]
    grid: np.ndarray

    def label(self) -> str:
        values = [
            str(self.fixed[name]) if name in self.fixed else name
            for name in DISPLAY_ORDER
        ]
        return f"({','.join(DISPLAY_ORDER)})=({','.join(values)})"

    def to_dataframe(self) -> pd.DataFrame:
        first, second = self.free_axes
        side = self.grid.shape[0]
        df = pd.DataFrame(
            self.grid,
            index=pd.Index(range(side), name=f"{first}\\{second}"),
            columns=[str(v) for v in range(side)]
        )
        return df


def parse_slice_spec(fixed_text: str, free_text: str) -> Tuple[Dict[str, int], Tuple[str, ...]]:
    """'theta1=1,x1=2,theta2=1,x2=0' and 'y1,y2' -> (fixed, free)"""
    fixed = {}
    for item in filter(None, (part.strip() for part in fixed_text.split(','))):
        name, sep, value = item.partition('=')
        if not sep:
            raise ValueError(f"Malformed fixed coordinate {item!r}, expected name=value")
        try:
            fixed[name.strip()] = int(value)
        except ValueError:
            raise ValueError(f"Coordinate {name.strip()} needs an integer value, got {value!r}")
    free = tuple(part.strip() for part in free_text.split(',') if part.strip())
    return fixed, free


def policy_slice(
    policy: PolicyTable,
    fixed: Dict[str, int],
    free_axes: Tuple[str, ...],
    component: str = 'beta'
) -> PolicySlice:
    """grid[u, v] = component of the policy at fixed + {free[0]: u, free[1]: v}"""
    if len(free_axes) != 2 or free_axes[0] == free_axes[1]:
        raise ValueError(f"Need two distinct free axes, got {free_axes}")
    for name in list(fixed) + list(free_axes):
        if name not in COORDINATES:
            raise ValueError(f"Unknown coordinate {name!r}; use one of {COORDINATES}")
    for name in free_axes:
        if name in fixed:
            raise ValueError(f"{name} cannot be both fixed and free")
    missing = [name for name in COORDINATES if name not in fixed and name not in free_axes]
    if missing:
        raise ValueError(f"Slice leaves coordinates unassigned: {missing}")
    for name, value in fixed.items():
        if not 0 <= value <= policy.n:
            raise ValueError(f"{name}={value} outside 0..{policy.n}")

    side = policy.n + 1
    table = policy.component_array(component).reshape((side,) * 6)
    index = [
        fixed[name] if name in fixed else slice(None)
        for name in COORDINATES
    ]
    grid = table[tuple(index)]
    # remaining axes come out in canonical order; put free_axes[0] first
    if COORDINATES.index(free_axes[0]) > COORDINATES.index(free_axes[1]):
        grid = grid.T

    return PolicySlice(component, dict(fixed), (free_axes[0], free_axes[1]), np.array(grid))
