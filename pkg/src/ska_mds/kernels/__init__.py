"""Enumeration kernels with a compiled core and a numpy fallback.

The Cython extension ``_core`` is used when it was built; otherwise, or when
``SKA_MDS_BACKEND=python`` is set, the pure implementation in ``_pure`` is
selected. Index ranges are sharded over threads and results are merged in
range order, so output never depends on the worker count.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pure

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

BACKENDS = {"python": _pure}
if _core is not None:
    BACKENDS["cython"] = _core

if os.environ.get("SKA_MDS_BACKEND", "").lower() == "python" or _core is None:
    BACKEND = "python"
else:
    BACKEND = "cython"


def get_backend(name: str | None = None):
    name = name or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None


def _ranges(total: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(int(workers), total)) if total else 1
    step, extra = divmod(total, workers)
    out, lo = [], 0
    for w in range(workers):
        hi = lo + step + (1 if w < extra else 0)
        out.append((lo, hi))
        lo = hi
    return out


def _run(fn, ranges):
    """Apply ``fn(lo, hi)`` to each range, on threads when there are several."""
    if len(ranges) == 1:
        return [fn(*ranges[0])]
    with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
        return list(pool.map(lambda r: fn(*r), ranges))


def _gen(gen) -> np.ndarray:
    return np.ascontiguousarray(gen, dtype=np.int64)


def project_codes(q: int, gen, positions, *, workers: int = 1, backend: str | None = None) -> np.ndarray:
    """Mixed-radix code of the codeword symbols at ``positions`` (0-based) for
    every message index in ``[0, q^k)``."""
    impl = get_backend(backend)
    gen = _gen(gen)
    positions = np.ascontiguousarray(positions, dtype=np.int64)
    total = q ** gen.shape[0]
    out = np.empty(total, dtype=np.int64)
    _run(lambda lo, hi: impl.project_codes(q, gen, positions, lo, hi, out[lo:hi]),
         _ranges(total, workers))
    return out


def min_weight(q: int, gen, *, workers: int = 1, backend: str | None = None) -> int:
    impl = get_backend(backend)
    gen = _gen(gen)
    total = q ** gen.shape[0]
    parts = _run(lambda lo, hi: impl.min_weight_range(q, gen, lo, hi),
                 _ranges(total, workers))
    return int(min(parts))


def joint_codes(q: int, gen, deliveries, public, n_masks: int, *, workers: int = 1,
                backend: str | None = None) -> np.ndarray:
    """Transcript code for every (message, mask) state, message-major order."""
    impl = get_backend(backend)
    gen = _gen(gen)
    deliveries = np.ascontiguousarray(deliveries, dtype=np.int64)
    public = np.ascontiguousarray(public, dtype=np.int64)
    total = q ** (gen.shape[0] + n_masks)
    out = np.empty(total, dtype=np.int64)
    _run(lambda lo, hi: impl.joint_codes(q, gen, deliveries, public, n_masks, lo, hi, out[lo:hi]),
         _ranges(total, workers))
    return out


def affine_counts(q: int, c0: int, c, r0, R, *, workers: int = 1,
                  backend: str | None = None) -> np.ndarray:
    """Histogram of ``c0 + c.g`` over all g in F_q^u with ``r0 + R g == 0``."""
    impl = get_backend(backend)
    c = np.ascontiguousarray(c, dtype=np.int64)
    r0 = np.ascontiguousarray(r0, dtype=np.int64)
    R = np.ascontiguousarray(np.asarray(R, dtype=np.int64).reshape(len(r0), len(c)))
    total = q ** len(c)

    def work(lo, hi):
        counts = np.zeros(q, dtype=np.int64)
        impl.affine_counts(q, c0, c, r0, R, lo, hi, counts)
        return counts

    return np.sum(_run(work, _ranges(total, workers)), axis=0)


def partition_min(n: int, k: int, *, backend: str | None = None):
    return get_backend(backend).partition_min(n, k)
