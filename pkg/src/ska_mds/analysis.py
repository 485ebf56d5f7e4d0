"""Secret key capacity, helper bound, McGill MMI and partition MMI for MDS sources.

All values are exact rationals in units of log2(q). For an (n, k) MDS code
with a uniform message every symbol subset S has H(Z_S) = min(|S|, k) log q,
which turns each information measure into integer arithmetic.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from . import budget, kernels
from .errors import BudgetExceeded, InvalidParams, InvalidPartition, OracleDisagreement, Overflow
from .field import FieldSpec

CAPACITY = "capacity"
HELPER_LOG_Q = "helper_bound:k<=h+1"
HELPER_RATIO = "helper_bound:k>h+1"


@dataclass(frozen=True)
class SetPartition:
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        canon = tuple(sorted(tuple(sorted(int(x) for x in b)) for b in self.blocks))
        object.__setattr__(self, "blocks", canon)
        if any(not b for b in canon):
            raise InvalidPartition("blocks must be nonempty")

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "SetPartition":
        groups: dict[int, list[int]] = {}
        for i, label in enumerate(rgs):
            groups.setdefault(label, []).append(i + 1)
        return cls(tuple(tuple(g) for g in groups.values()))

    @classmethod
    def singletons(cls, n: int) -> "SetPartition":
        return cls(tuple((i,) for i in range(1, n + 1)))

    @property
    def ground(self) -> list[int]:
        return sorted(x for b in self.blocks for x in b)

    def check_covers(self, n: int) -> None:
        if self.ground != list(range(1, n + 1)):
            raise InvalidPartition(f"blocks {self.blocks} do not partition 1..{n}")

    def __len__(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return "|".join(",".join(map(str, b)) for b in self.blocks)


def restricted_growth_strings(n: int) -> Iterator[list[int]]:
    """All restricted growth strings of length n (one per set partition)."""
    if n < 1:
        return
    a = [0] * n
    mx = [0] * n
    while True:
        yield a[:]
        i = n - 1
        while i >= 1 and a[i] == mx[i] + 1:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, n):
            a[j] = 0
            mx[j] = max(mx[j - 1], a[j - 1])


def partitions(n: int, min_blocks: int = 1) -> Iterator[SetPartition]:
    for rgs in restricted_growth_strings(n):
        if max(rgs) + 1 >= min_blocks:
            yield SetPartition.from_rgs(rgs)


@dataclass(frozen=True)
class CapacityReport:
    value: Fraction               # multiple of log2(q)
    regime: str
    n: int
    k: int
    q: int
    active: int
    helpers: int
    upper_bound: bool = False

    @property
    def bits(self) -> float:
        return float(self.value) * math.log2(self.q)

    def row(self) -> dict:
        return {
            "n": self.n, "k": self.k, "q": self.q, "regime": self.regime,
            "value_num": self.value.numerator, "value_den": self.value.denominator,
            "value_bits": repr(self.bits),
        }


def _check_code(n: int, k: int, q: int) -> None:
    FieldSpec(q)
    if not 1 <= k <= n <= q - 1:
        raise InvalidParams(f"need 1 <= k <= n <= q-1, got n={n}, k={k}, q={q}")


def capacity(n: int, k: int, q: int) -> CapacityReport:
    """C_S = (n - k)/(n - 1) log q with every terminal active."""
    _check_code(n, k, q)
    if n < 2:
        raise InvalidParams("capacity needs at least two terminals")
    return CapacityReport(Fraction(n - k, n - 1), CAPACITY, n, k, q, n, 0)


def helper_bound(n: int, k: int, q: int, active: int, helpers: int) -> CapacityReport:
    """Upper bound on the key rate when h terminals only help."""
    _check_code(n, k, q)
    if active + helpers != n or helpers < 0:
        raise InvalidParams(f"|A| + h must equal n ({active} + {helpers} != {n})")
    if active < 2:
        raise InvalidParams("need at least two active terminals")
    if k <= helpers + 1:
        return CapacityReport(Fraction(1), HELPER_LOG_Q, n, k, q, active, helpers, True)
    return CapacityReport(Fraction(n - k, active - 1), HELPER_RATIO, n, k, q, active, helpers, True)


def mcgill_mmi_closed(n: int, k: int) -> int:
    """(-1)^(k-1) C(n-2, k-1), the McGill MMI coefficient of log q.

    n = k = 1 uses the extended binomial C(-1, 0) = 1: a single symbol's
    MMI is just its entropy.
    """
    if not 1 <= k <= n:
        raise InvalidParams(f"need 1 <= k <= n, got n={n}, k={k}")
    if n == 1:
        return 1
    return (-1) ** (k - 1) * math.comb(n - 2, k - 1)


def mcgill_mmi_bruteforce(n: int, k: int, subsets: bool = False) -> int:
    """Inclusion-exclusion sum of min(|S|, k) over nonempty subsets S of n symbols."""
    if not 1 <= k <= n:
        raise InvalidParams(f"need 1 <= k <= n, got n={n}, k={k}")
    if n > 62:
        raise Overflow("binomial terms exceed 64-bit range for n > 62")
    if not subsets:
        return sum((-1) ** (i - 1) * math.comb(n, i) * min(i, k) for i in range(1, n + 1))
    if n > 24:
        raise BudgetExceeded("subset-sum form limited to n <= 24")
    total = 0
    for mask in range(1, 1 << n):
        size = mask.bit_count()
        total += (1 if size % 2 else -1) * min(size, k)
    return total


def partition_mmi(n: int, k: int, q: int, partition: SetPartition) -> Fraction:
    """(sum_C H(Z_C) - H(Z_V)) / (|P| - 1) in log q units."""
    _check_code(n, k, q)
    partition.check_covers(n)
    if len(partition) < 2:
        raise InvalidPartition("partition needs at least two blocks")
    return Fraction(sum(min(len(b), k) for b in partition.blocks) - k, len(partition) - 1)


@dataclass(frozen=True)
class MmiReport:
    value: Fraction
    minimizing_partition: SetPartition
    n: int
    k: int
    q: int
    partitions_enumerated: int
    minimizers: int
    singleton_value: Fraction
    per_partition: tuple[tuple[SetPartition, Fraction], ...] = field(default=())

    @property
    def singleton_minimizes(self) -> bool:
        return self.singleton_value == self.value

    def to_dict(self) -> dict:
        frac = lambda x: {"num": str(x.numerator), "den": str(x.denominator), "unit": "log2(q)"}
        out = {
            "n": str(self.n), "k": str(self.k), "q": str(self.q),
            "value": frac(self.value),
            "value_bits": float(self.value) * math.log2(self.q),
            "minimizing_partition": [[str(x) for x in b] for b in self.minimizing_partition.blocks],
            "partitions_enumerated": str(self.partitions_enumerated),
            "minimizers": str(self.minimizers),
            "singleton_minimizes": self.singleton_minimizes,
        }
        if self.per_partition:
            out["per_partition"] = [
                {"partition": str(P), "value": frac(v)} for P, v in self.per_partition]
        return out


def min_partition_mmi(n: int, k: int, q: int, per_partition: bool = False,
                      backend: str | None = None) -> MmiReport:
    """Minimum of partition MMI over every partition with >= 2 blocks.

    Ties go to the lexicographically smallest canonical block list. The
    result is checked against the closed-form capacity.
    """
    _check_code(n, k, q)
    if n < 2:
        raise InvalidParams("need n >= 2 for a partition with two blocks")
    if n > budget.PARTITION_MAX_N:
        raise BudgetExceeded(f"partition enumeration limited to n <= {budget.PARTITION_MAX_N}")
    num, den, rgs, seen, ties = kernels.partition_min(n, k, backend=backend)
    value = Fraction(num, den)
    table = ()
    if per_partition and n <= 8:
        table = tuple((P, partition_mmi(n, k, q, P)) for P in partitions(n, min_blocks=2))
    report = MmiReport(value, SetPartition.from_rgs(rgs), n, k, q, int(seen), int(ties),
                       Fraction(n - k, n - 1), table)
    if value != capacity(n, k, q).value:
        raise OracleDisagreement(
            f"partition minimum {value} differs from closed form {capacity(n, k, q).value}")
    return report


def capacity_sweep(n_values: Iterable[int], q: int, helpers: bool = False) -> list[CapacityReport]:
    """Capacity for every (n, k); with ``helpers`` also every helper split."""
    rows = []
    for n in n_values:
        for k in range(1, n + 1):
            if n < 2 or n > q - 1:
                continue
            rows.append(capacity(n, k, q))
            if helpers:
                for h in range(1, n - 1):
                    rows.append(helper_bound(n, k, q, n - h, h))
    return rows


def sweep_csv(rows: Sequence[CapacityReport]) -> str:
    buf = io.StringIO()
    cols = ["n", "k", "q", "regime", "value_num", "value_den", "value_bits"]
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r.row())
    return buf.getvalue()
