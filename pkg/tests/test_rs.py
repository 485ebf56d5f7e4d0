import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from ska_mds.errors import InconsistentShares, InsufficientShares, InvalidParams, LengthMismatch, BudgetExceeded
from ska_mds.field import FieldSpec, Polynomial, eval_poly
from ska_mds.rs import (
    KeyBlock,
    RsParams,
    Share,
    build_generator,
    decode,
    encode,
    encode_ints,
    verify_mds_distance,
)

F7 = FieldSpec(7)


def test_generator_examples():
    g = build_generator(RsParams.create(7, 3, 2))
    assert g.rows == ((1, 1, 1), (1, 2, 3))
    p = RsParams.create(7, 4, 1, coeffs=[2, 3, 4, 5])
    assert build_generator(p).rows == ((2, 3, 4, 5),)
    with pytest.raises(InvalidParams):
        RsParams.create(7, 3, 2, alphas=[1, 1, 2])


def test_generator_entries_are_scaled_powers():
    p = RsParams.create(11, 6, 4, alphas=[2, 3, 5, 7, 8, 10], coeffs=[1, 4, 9, 3, 2, 6])
    g = build_generator(p)
    for i in range(4):
        for j in range(6):
            assert g.rows[i][j] == p.coeffs[j] * pow(p.alphas[j], i, 11) % 11


@pytest.mark.parametrize("kwargs", [
    dict(q=7, n=7, k=2),                       # n > q - 1
    dict(q=7, n=3, k=4),                       # k > n
    dict(q=7, n=3, k=0),
    dict(q=7, n=3, k=2, alphas=[0, 1, 2]),     # zero point
    dict(q=7, n=3, k=2, coeffs=[1, 0, 1]),     # zero coefficient
])
def test_invalid_params(kwargs):
    with pytest.raises(InvalidParams):
        RsParams.create(**kwargs)


def test_encode_example_against_eval_oracle():
    p = RsParams.create(7, 3, 2)
    cw = encode(KeyBlock.from_ints(F7, [3, 2]), p)
    poly = Polynomial.from_ints(F7, [3, 2])
    assert cw.ints() == [eval_poly(poly, F7(a)).value for a in (1, 2, 3)]
    assert cw.ints() == [5, 0, 2]


def test_encode_constant_and_zero():
    p = RsParams.create(7, 4, 1, coeffs=[1, 2, 3, 4])
    assert encode(KeyBlock.from_ints(F7, [5]), p).ints() == [5, 3, 1, 6]
    p = RsParams.create(7, 5, 3)
    assert encode(KeyBlock.from_ints(F7, [0, 0, 0]), p).ints() == [0] * 5


def test_encode_length_mismatch():
    with pytest.raises(LengthMismatch):
        encode(KeyBlock.from_ints(F7, [1, 2, 3]), RsParams.create(7, 3, 2))


def test_encode_matches_matrix_product():
    p = RsParams.create(13, 7, 4, coeffs=[3, 1, 4, 1, 5, 9, 2])
    g = build_generator(p)
    m = [6, 0, 11, 2]
    direct = [sum(m[i] * g.rows[i][j] for i in range(4)) % 13 for j in range(7)]
    assert encode_ints(m, p) == direct


def test_decode_example():
    p = RsParams.create(7, 3, 2)
    key = decode([Share(2, F7(0)), Share(3, F7(2))], p)
    assert key.ints() == [3, 2]


def test_decode_below_threshold():
    p = RsParams.create(7, 5, 3)
    with pytest.raises(InsufficientShares):
        decode([Share(1, F7(1)), Share(2, F7(2))], p)


def test_decode_extra_shares_checked():
    p = RsParams.create(7, 5, 2)
    cw = encode(KeyBlock.from_ints(F7, [4, 1]), p)
    assert decode(cw.shares(), p).ints() == [4, 1]
    bad = cw.shares()
    bad[4] = Share(5, bad[4].symbol + F7(1))
    with pytest.raises(InconsistentShares):
        decode(bad, p)


@pytest.mark.parametrize("q,n,k", [(5, 4, 2), (7, 6, 3), (11, 7, 4), (13, 8, 5)])
def test_roundtrip_every_subset(q, n, k):
    p = RsParams.create(q, n, k, coeffs=[(3 * j) % (q - 1) + 1 for j in range(n)])
    f = p.field
    rng = random.Random(q * 100 + n)
    for _ in range(20):
        key = KeyBlock.from_ints(f, [rng.randrange(q) for _ in range(k)])
        cw = encode(key, p)
        for S in itertools.combinations(range(1, n + 1), k):
            assert decode(cw.shares(S), p) == key


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([5, 7, 11, 13]), st.data())
def test_linearity(q, data):
    n = data.draw(st.integers(1, q - 1))
    k = data.draw(st.integers(1, n))
    p = RsParams.create(q, n, k)
    k1 = data.draw(st.lists(st.integers(0, q - 1), min_size=k, max_size=k))
    k2 = data.draw(st.lists(st.integers(0, q - 1), min_size=k, max_size=k))
    a = data.draw(st.integers(0, q - 1))
    combo = [(a * x + y) % q for x, y in zip(k1, k2)]
    lhs = encode_ints(combo, p)
    rhs = [(a * x + y) % q for x, y in zip(encode_ints(k1, p), encode_ints(k2, p))]
    assert lhs == rhs


def pairwise_min_distance(p):
    q, k = p.q, p.k
    words = [encode_ints(list(m), p) for m in itertools.product(range(q), repeat=k)]
    return min(sum(a != b for a, b in zip(u, v))
               for u, v in itertools.combinations(words, 2))


def test_mds_distance_example_with_pairwise_oracle(backend):
    p = RsParams.create(5, 4, 2)
    assert pairwise_min_distance(p) == 3
    from ska_mds import kernels
    rep = verify_mds_distance(p)
    assert rep.distance == 3 == rep.singleton and rep.is_mds
    assert kernels.min_weight(5, build_generator(p).as_array(), backend=backend) == 3


@pytest.mark.parametrize("q,n,k", [(5, 3, 2), (7, 5, 2), (7, 4, 3), (5, 4, 1), (7, 6, 2)])
def test_mds_distance_agrees_with_pairwise(q, n, k):
    p = RsParams.create(q, n, k, coeffs=[j + 1 for j in range(n)])
    assert verify_mds_distance(p).distance == pairwise_min_distance(p) == n - k + 1


def test_mds_distance_k_equals_n():
    assert verify_mds_distance(RsParams.create(7, 5, 5)).distance == 1


def test_mds_budget():
    with pytest.raises(BudgetExceeded):
        verify_mds_distance(RsParams.create(101, 30, 20))


def test_mds_budget_env_override(monkeypatch):
    monkeypatch.setenv("SKA_MDS_BUDGET", "100")
    with pytest.raises(BudgetExceeded):
        verify_mds_distance(RsParams.create(11, 5, 2))


@pytest.mark.parametrize("q", [5, 7])
def test_subsets_below_threshold_are_uniform(q):
    """Any fewer than k symbols of a uniformly padded message are jointly uniform."""
    for n in range(1, q):
        for k in range(1, n + 1):
            p = RsParams.create(q, n, k)
            words = [encode_ints(list(m), p) for m in itertools.product(range(q), repeat=k)]
            for size in range(1, k):
                for S in itertools.combinations(range(n), size):
                    hist = Counter(tuple(w[i] for i in S) for w in words)
                    assert len(hist) == q ** size
                    assert set(hist.values()) == {q ** (k - size)}
