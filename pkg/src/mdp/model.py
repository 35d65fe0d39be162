"""
Model types and cost functions for the two-source relay CMDP
"""
import hashlib
import json
from dataclasses import dataclass, asdict
from typing import List, Tuple


NUM_SOURCES = 2


def _check_probability(name: str, value: float):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be a probability in [0, 1], got {value}")


def check_truncation(n: int) -> int:
    """Validate a truncation level N (AoI cap)"""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"Truncation level must be a positive integer, got {n}")
    return int(n)


@dataclass(frozen=True)
class SystemParams:
    """Arrival rates, link reliabilities and the transmission budget"""
    mu1: float
    mu2: float
    p: float
    q: float
    gamma_max: float = 2.0

    def __post_init__(self):
        _check_probability('mu1', self.mu1)
        _check_probability('mu2', self.mu2)
        _check_probability('p', self.p)
        _check_probability('q', self.q)
        if not 0.0 < self.gamma_max <= 2.0:
            raise ValueError(f"gamma_max must lie in (0, 2], got {self.gamma_max}")

    @property
    def arrival_rates(self) -> Tuple[float, float]:
        return (self.mu1, self.mu2)

    def with_budget(self, gamma_max: float) -> 'SystemParams':
        return SystemParams(self.mu1, self.mu2, self.p, self.q, gamma_max)

    def params_hash(self) -> str:
        """Short stable digest, stored in policy files"""
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:16]


@dataclass(frozen=True)
class SourceState:
    """Per-source triple: AoI at Tx, relative AoI at R, relative AoI at D"""
    theta: int
    x: int
    y: int

    def __post_init__(self):
        if self.theta < 0 or self.x < 0 or self.y < 0:
            raise ValueError(f"Source state coordinates must be nonnegative: {self}")

    @property
    def delta(self) -> int:
        """Absolute AoI at the relay"""
        return self.theta + self.x

    @property
    def dest(self) -> int:
        """Absolute AoI at the destination"""
        return self.theta + self.x + self.y

    @classmethod
    def from_absolute(cls, theta: int, delta: int, dest: int) -> 'SourceState':
        return cls(theta, delta - theta, dest - delta)

    def cost(self) -> int:
        return self.theta + self.x + self.y


@dataclass(frozen=True)
class State:
    """Joint CMDP state, canonical order (theta1, x1, y1, theta2, x2, y2)"""
    s1: SourceState
    s2: SourceState

    @classmethod
    def of(cls, theta1: int, x1: int, y1: int, theta2: int, x2: int, y2: int) -> 'State':
        return cls(SourceState(theta1, x1, y1), SourceState(theta2, x2, y2))

    def as_tuple(self) -> Tuple[int, int, int, int, int, int]:
        return (self.s1.theta, self.s1.x, self.s1.y, self.s2.theta, self.s2.x, self.s2.y)

    def source(self, i: int) -> SourceState:
        """Source i in {1, 2}"""
        if i == 1:
            return self.s1
        if i == 2:
            return self.s2
        raise ValueError(f"Source index must be 1 or 2, got {i}")


@dataclass(frozen=True)
class Action:
    """Tx decision alpha and relay decision beta, each in {0 (idle), 1, 2}"""
    alpha: int
    beta: int

    def __post_init__(self):
        if self.alpha not in (0, 1, 2) or self.beta not in (0, 1, 2):
            raise ValueError(f"Action components must be in {{0, 1, 2}}: {self}")

    @property
    def code(self) -> int:
        """Flat code 0..8, lexicographic in (alpha, beta) with idle first"""
        return 3 * self.alpha + self.beta

    @classmethod
    def from_code(cls, code: int) -> 'Action':
        if not 0 <= code <= 8:
            raise ValueError(f"Action code must be in 0..8, got {code}")
        return cls(code // 3, code % 3)

    def serves(self, i: int) -> Tuple[bool, bool]:
        """(Tx link serves source i, relay link serves source i)"""
        return (self.alpha == i, self.beta == i)


ALL_ACTIONS: List[Action] = [Action.from_code(c) for c in range(9)]
IDLE = Action(0, 0)


def aoi_cost(state: State) -> int:
    """Sum AoI at the destination, C(s)"""
    return state.s1.cost() + state.s2.cost()


def transmission_cost(action: Action) -> int:
    """Number of active links, D(a)"""
    return int(action.alpha != 0) + int(action.beta != 0)


def lagrangian_cost(state: State, action: Action, lam: float) -> float:
    """L(s, a; lambda) = C(s) + lambda * D(a)"""
    if lam < 0:
        raise ValueError(f"Lagrange multiplier must be nonnegative, got {lam}")
    return aoi_cost(state) + lam * transmission_cost(action)
