import itertools

from fractions import Fraction

import numpy as np
import pytest

from ska_mds import kernels
from ska_mds.analysis import SetPartition, partitions
from ska_mds.rs import RsParams, build_generator, encode_ints


def pack(digits, q):
    code = 0
    for d in digits:
        code = code * q + d
    return code


@pytest.fixture
def code():
    p = RsParams.create(7, 6, 3, coeffs=[2, 1, 3, 1, 5, 4])
    return p, build_generator(p).as_array()


def test_project_codes_matches_encoder(code, backend):
    p, G = code
    out = kernels.project_codes(7, G, [1, 4, 5], backend=backend, workers=3)
    msgs = list(itertools.product(range(7), repeat=3))
    expected = [pack([encode_ints(list(m), p)[i] for i in (1, 4, 5)], 7) for m in msgs]
    assert out.tolist() == expected


def test_joint_codes_matches_direct_enumeration(code, backend):
    p, G = code
    deliveries, public, masks = [0, 2], [4, 5], 2
    out = kernels.joint_codes(7, G, deliveries, public, masks, backend=backend, workers=4)
    expected = []
    for m in itertools.product(range(7), repeat=3):
        z = encode_ints(list(m), p)
        for r in itertools.product(range(7), repeat=masks):
            row = [(z[d] + r[j]) % 7 for j, d in enumerate(deliveries)] + [z[i] for i in public]
            expected.append(pack(row, 7))
    assert out.tolist() == expected


def test_min_weight_matches_scan(code, backend):
    p, G = code
    words = [encode_ints(list(m), p) for m in itertools.product(range(7), repeat=3)][1:]
    assert kernels.min_weight(7, G, backend=backend) == min(sum(1 for x in w if x) for w in words)


def test_affine_counts_matches_loop(backend):
    q = 5
    c0, c = 3, [1, 4]
    r0, R = [2], [[1, 1]]
    hist = [0] * q
    for g in itertools.product(range(q), repeat=2):
        if (r0[0] + R[0][0] * g[0] + R[0][1] * g[1]) % q == 0:
            hist[(c0 + c[0] * g[0] + c[1] * g[1]) % q] += 1
    got = kernels.affine_counts(q, c0, c, r0, np.array(R), backend=backend, workers=2)
    assert got.tolist() == hist


@pytest.mark.parametrize("n", range(2, 8))
def test_partition_min_matches_python_enumeration(n, backend):
    for k in range(1, n + 1):
        best = None
        ties = 0
        for P in partitions(n, min_blocks=2):
            val = (sum(min(len(b), k) for b in P.blocks) - k, len(P) - 1)
            if best is None or val[0] * best[1][1] < best[1][0] * val[1]:
                best, ties = (P.blocks, val), 1
            elif val[0] * best[1][1] == best[1][0] * val[1]:
                ties += 1
                if P.blocks < best[0]:
                    best = (P.blocks, val)
        num, den, rgs, seen, t = kernels.partition_min(n, k, backend=backend)
        assert Fraction(num, den) == Fraction(*best[1])
        assert SetPartition.from_rgs(rgs).blocks == best[0]
        assert t == ties


def test_worker_count_does_not_change_results(code):
    p, G = code
    for backend in kernels.BACKENDS:
        base = kernels.joint_codes(7, G, [0, 1], [5], 2, backend=backend, workers=1)
        for w in (2, 3, 8, 64):
            assert np.array_equal(base, kernels.joint_codes(7, G, [0, 1], [5], 2, backend=backend, workers=w))


def test_backends_agree(code):
    p, G = code
    outs = [kernels.joint_codes(7, G, [0, 3], [4, 5], 2, backend=b) for b in kernels.BACKENDS]
    for o in outs[1:]:
        assert np.array_equal(outs[0], o)


def test_backend_selection_reports_known_name():
    assert kernels.BACKEND in kernels.BACKENDS
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")
