import csv
import io
import math
from fractions import Fraction

import pytest

from ska_mds.analysis import (
    HELPER_LOG_Q,
    HELPER_RATIO,
    SetPartition,
    capacity,
    capacity_sweep,
    helper_bound,
    mcgill_mmi_bruteforce,
    mcgill_mmi_closed,
    min_partition_mmi,
    partition_mmi,
    partitions,
    restricted_growth_strings,
    sweep_csv,
)
from ska_mds.errors import BudgetExceeded, InvalidParams, InvalidPartition, Overflow
from ska_mds.rs import RsParams
from ska_mds.secrecy import codeword_distribution, kl_divergence


def bell_numbers(n_max):
    """Bell triangle, independent of the RGS enumerator."""
    row, out = [1], [1]
    for _ in range(n_max):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
        out.append(row[0])
    return out


def test_rgs_counts_are_bell_numbers():
    bell = bell_numbers(9)
    for n in range(1, 10):
        assert sum(1 for _ in restricted_growth_strings(n)) == bell[n]


def test_partitions_are_distinct_covers():
    seen = set()
    for P in partitions(5):
        P.check_covers(5)
        seen.add(P.blocks)
    assert len(seen) == 52


def test_capacity_examples():
    assert capacity(4, 2, 5).value == Fraction(2, 3)
    assert capacity(4, 2, 5).bits == pytest.approx(2 / 3 * math.log2(5), abs=1e-12)
    for n in range(2, 7):
        assert capacity(n, n, 7).value == 0
        assert capacity(n, 1, 7).value == 1


def test_capacity_invalid():
    for args in [(1, 1, 5), (5, 2, 5), (3, 4, 7), (3, 2, 8)]:
        with pytest.raises(InvalidParams):
            capacity(*args)


def test_helper_bound_examples():
    r = helper_bound(6, 2, 7, 3, 3)
    assert r.value == 1 and r.regime == HELPER_LOG_Q and r.upper_bound
    r = helper_bound(6, 5, 7, 5, 1)
    assert r.value == Fraction(1, 4) and r.regime == HELPER_RATIO


def test_helper_bound_without_helpers_is_capacity():
    for n in range(2, 13):
        for k in range(1, n + 1):
            assert helper_bound(n, k, 13, n, 0).value == capacity(n, k, 13).value


def test_helper_bound_invalid():
    with pytest.raises(InvalidParams):
        helper_bound(6, 2, 7, 3, 2)
    with pytest.raises(InvalidParams):
        helper_bound(6, 2, 7, 1, 5)


def test_mcgill_examples():
    assert mcgill_mmi_closed(4, 2) == -2
    assert mcgill_mmi_closed(5, 3) == 3
    assert mcgill_mmi_bruteforce(4, 2) == 4 - 12 + 8 - 2
    assert mcgill_mmi_bruteforce(5, 3) == 5 - 20 + 30 - 15 + 3
    for n in range(2, 21):
        assert mcgill_mmi_closed(n, n) == 0 == mcgill_mmi_bruteforce(n, n)


def test_mcgill_subset_form():
    for n in range(1, 13):
        for k in range(1, n + 1):
            assert mcgill_mmi_bruteforce(n, k, subsets=True) == mcgill_mmi_bruteforce(n, k)


def test_mcgill_sign_law():
    for n in range(2, 21):
        for k in range(1, n + 1):
            v = mcgill_mmi_closed(n, k)
            if math.comb(n - 2, k - 1) == 0:
                assert v == 0
            else:
                assert (v > 0) == (k % 2 == 1)


def test_mcgill_limits():
    with pytest.raises(Overflow):
        mcgill_mmi_bruteforce(63, 3)
    with pytest.raises(BudgetExceeded):
        mcgill_mmi_bruteforce(25, 3, subsets=True)
    with pytest.raises(InvalidParams):
        mcgill_mmi_closed(3, 4)


def test_partition_mmi_examples():
    assert partition_mmi(4, 2, 5, SetPartition.singletons(4)) == Fraction(2, 3)
    assert partition_mmi(4, 2, 5, SetPartition(((1, 2), (3,), (4,)))) == 1
    with pytest.raises(InvalidPartition):
        partition_mmi(4, 2, 5, SetPartition(((1, 2, 3, 4),)))
    with pytest.raises(InvalidPartition):
        partition_mmi(4, 2, 5, SetPartition(((1, 2), (3,))))


def test_min_partition_examples(backend):
    r = min_partition_mmi(4, 2, 5, backend=backend)
    assert r.value == Fraction(2, 3)
    assert r.minimizing_partition == SetPartition.singletons(4)
    assert min_partition_mmi(5, 3, 7, backend=backend).value == Fraction(1, 2)
    for n in range(2, 9):
        assert min_partition_mmi(n, n, 11, backend=backend).value == 0


def test_min_partition_per_partition_table():
    r = min_partition_mmi(4, 2, 5, per_partition=True)
    assert len(r.per_partition) == 14
    assert min(v for _, v in r.per_partition) == r.value


def test_min_partition_budget():
    with pytest.raises(BudgetExceeded):
        min_partition_mmi(13, 2, 17)


@pytest.mark.parametrize("q,n,k", [(5, 4, 1), (5, 4, 2), (5, 4, 3), (7, 5, 2), (7, 5, 3)])
def test_partition_mmi_matches_distributional_kl(q, n, k):
    joint = codeword_distribution(RsParams.create(q, n, k))
    for P in partitions(n, min_blocks=2):
        kl = kl_divergence(joint, P.blocks)
        assert float(partition_mmi(n, k, q, P)) == pytest.approx(kl.direct / (len(P) - 1), abs=1e-12)


def test_sweep_csv_columns():
    rows = capacity_sweep(range(2, 5), 7, helpers=True)
    parsed = list(csv.DictReader(io.StringIO(sweep_csv(rows))))
    assert list(parsed[0]) == ["n", "k", "q", "regime", "value_num", "value_den", "value_bits"]
    assert any(r["regime"] == HELPER_LOG_Q for r in parsed)
    r = next(r for r in parsed if r["n"] == "4" and r["k"] == "2" and r["regime"] == "capacity")
    assert (r["value_num"], r["value_den"]) == ("2", "3")
