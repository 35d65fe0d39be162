"""
Deterministic stationary policy table and its text file format
"""
import os
import sys
from typing import Optional

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from mdp.model import Action, State, check_truncation
from mdp.state_space import num_source_states, num_states, state_index


POLICY_FORMAT_VERSION = 1
_MAGIC = '# relay-aoi policy'


class PolicyFileError(ValueError):
    """Malformed, truncated or mismatched policy file"""


class PolicyTable:
    """One action code (3 * alpha + beta) per truncated state"""

    def __init__(
        self,
        n: int,
        actions: np.ndarray,
        lambda_value: Optional[float] = None,
        params_hash: Optional[str] = None
    ):
        self.n = check_truncation(n)
        raw = np.asarray(actions).ravel()
        if raw.size != num_states(self.n):
            raise ValueError(
                f"Policy for N={self.n} needs {num_states(self.n)} actions, got {raw.size}"
            )
        if raw.size and not np.issubdtype(raw.dtype, np.number):
            raise ValueError(f"Action codes must be numeric, got dtype {raw.dtype}")
        # range and integrality are checked before narrowing to int8
        if raw.size and (raw.min() < 0 or raw.max() > 8 or np.any(raw != np.floor(raw))):
            raise ValueError("Action codes must be integers in 0..8")
        self.actions = raw.astype(np.int8)
        self.lambda_value = lambda_value
        self.params_hash = params_hash

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolicyTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.actions, other.actions)

    def __repr__(self) -> str:
        return f"PolicyTable(n={self.n}, lambda={self.lambda_value})"

    @property
    def num_states(self) -> int:
        return self.actions.size

    def action_at(self, state: State) -> Action:
        return Action.from_code(int(self.actions[state_index(state, self.n)]))

    def code_grid(self) -> np.ndarray:
        """Codes on the (m, m) source-pair grid"""
        m = num_source_states(self.n)
        return self.actions.reshape(m, m)

    def alpha_array(self) -> np.ndarray:
        return self.actions // 3

    def beta_array(self) -> np.ndarray:
        return self.actions % 3

    def component_array(self, component: str) -> np.ndarray:
        if component == 'alpha':
            return self.alpha_array()
        if component == 'beta':
            return self.beta_array()
        raise ValueError(f"Unknown action component: {component}")


def constant_policy(n: int, action: Action) -> PolicyTable:
    return PolicyTable(n, np.full(num_states(n), action.code, dtype=np.int8))


def idle_policy(n: int) -> PolicyTable:
    return constant_policy(n, Action(0, 0))


def save_policy(policy: PolicyTable, path: str):
    """Write header lines, then one row of digits per source-1 substate"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    lam = '' if policy.lambda_value is None else repr(float(policy.lambda_value))
    with open(path, 'w') as f:
        f.write(f"{_MAGIC}\n")
        f.write(f"version={POLICY_FORMAT_VERSION}\n")
        f.write(f"n={policy.n}\n")
        f.write(f"params_hash={policy.params_hash or ''}\n")
        f.write(f"lambda={lam}\n")
        f.write(f"states={policy.num_states}\n")
        f.write("actions\n")
        for row in policy.code_grid():
            f.write(''.join(str(int(c)) for c in row) + "\n")
        f.write("end\n")


def load_policy(path: str, expected_n: Optional[int] = None) -> PolicyTable:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Policy file not found: {path}")

    with open(path, 'r') as f:
        lines = [line.rstrip('\n') for line in f]

    if not lines or lines[0] != _MAGIC:
        raise PolicyFileError(f"{path}: not a policy file")

    header = {}
    cursor = 1
    while cursor < len(lines) and lines[cursor] != 'actions':
        key, sep, value = lines[cursor].partition('=')
        if not sep:
            raise PolicyFileError(f"{path}: bad header line {lines[cursor]!r}")
        header[key] = value
        cursor += 1
    if cursor >= len(lines):
        raise PolicyFileError(f"{path}: missing action section")

    try:
        version = int(header['version'])
        n = int(header['n'])
        declared = int(header['states'])
    except (KeyError, ValueError) as e:
        raise PolicyFileError(f"{path}: incomplete header ({e})")

    if version != POLICY_FORMAT_VERSION:
        raise PolicyFileError(f"{path}: unsupported version {version}")
    if expected_n is not None and n != expected_n:
        raise PolicyFileError(f"{path}: policy is for N={n}, expected N={expected_n}")
    if declared != num_states(n):
        raise PolicyFileError(f"{path}: {declared} states does not match N={n}")

    m = num_source_states(n)
    body = lines[cursor + 1:cursor + 1 + m]
    if len(body) != m or cursor + 1 + m >= len(lines) or lines[cursor + 1 + m] != 'end':
        raise PolicyFileError(f"{path}: truncated action section")
    if any(len(row) != m or not row.isdigit() for row in body):
        raise PolicyFileError(f"{path}: malformed action row")

    codes = np.frombuffer(''.join(body).encode('ascii'), dtype=np.uint8) - ord('0')
    if codes.max() > 8:
        raise PolicyFileError(f"{path}: action code out of range")

    lam = header.get('lambda', '')
    return PolicyTable(
        n,
        codes.astype(np.int8),
        lambda_value=float(lam) if lam else None,
        params_hash=header.get('params_hash') or None
    )
