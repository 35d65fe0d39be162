"""
Truncated state space: enumeration and index bijection
"""
import os
import sys
from typing import List

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from mdp.model import SourceState, State, check_truncation


def num_source_states(n: int) -> int:
    return (check_truncation(n) + 1) ** 3


def num_states(n: int) -> int:
    return num_source_states(n) ** 2


def source_index(src: SourceState, n: int) -> int:
    """Row-major index of (theta, x, y) within the per-source space"""
    n = check_truncation(n)
    for name, value in (('theta', src.theta), ('x', src.x), ('y', src.y)):
        if not 0 <= value <= n:
            raise ValueError(f"{name}={value} outside truncated range 0..{n}")
    side = n + 1
    return (src.theta * side + src.x) * side + src.y


def source_state_at(i: int, n: int) -> SourceState:
    n = check_truncation(n)
    side = n + 1
    if not 0 <= i < side ** 3:
        raise ValueError(f"Source index {i} outside 0..{side ** 3 - 1}")
    theta, rest = divmod(i, side * side)
    x, y = divmod(rest, side)
    return SourceState(theta, x, y)


def state_index(state: State, n: int) -> int:
    """Index consistent with enumerate_states (row-major over the canonical tuple)"""
    return source_index(state.s1, n) * num_source_states(n) + source_index(state.s2, n)


def index_state(i: int, n: int) -> State:
    total = num_states(n)
    if not 0 <= i < total:
        raise ValueError(f"State index {i} outside 0..{total - 1}")
    i1, i2 = divmod(i, num_source_states(n))
    return State(source_state_at(i1, n), source_state_at(i2, n))


def enumerate_source_states(n: int) -> List[SourceState]:
    return [source_state_at(i, n) for i in range(num_source_states(n))]


def enumerate_states(n: int) -> List[State]:
    """All (N+1)^6 states, row-major over (theta1, x1, y1, theta2, x2, y2)"""
    sources = enumerate_source_states(n)
    return [State(s1, s2) for s1 in sources for s2 in sources]
