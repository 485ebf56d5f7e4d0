"""Enumeration caps. ``SKA_MDS_BUDGET`` overrides every default cap."""
import os

from .errors import BudgetExceeded

CODE_CAP = 1 << 22       # codeword enumeration (q^k)
JOINT_CAP = 1 << 24      # joint (key, masks) enumeration
ATTACK_CAP = 1 << 24     # q^u brute-force guesses
PARTITION_MAX_N = 12     # Bell(12) = 4213597

ENV_VAR = "SKA_MDS_BUDGET"


def cap(default: int, override: int | None = None) -> int:
    if override is not None:
        return int(override)
    env = os.environ.get(ENV_VAR)
    if env:
        return int(env, 0)
    return default


def check(states: int, limit: int, what: str) -> None:
    if states > limit:
        raise BudgetExceeded(f"{what}: {states} states exceeds cap {limit}")
