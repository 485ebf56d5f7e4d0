"""Pure-Python/numpy fallback with the same signatures as the compiled core."""
import numpy as np

_CHUNK = 1 << 16


def _digits(idx: np.ndarray, q: int, width: int) -> np.ndarray:
    out = np.empty((idx.shape[0], width), dtype=np.int64)
    rest = idx.copy()
    for j in range(width - 1, -1, -1):
        out[:, j] = rest % q
        rest //= q
    return out


def _symbols(msg: np.ndarray, gen: np.ndarray, cols, q: int) -> np.ndarray:
    # q < 2^31 and k small, so the int64 dot product cannot overflow per term;
    # reduce after every term to stay safe for larger k.
    g = np.asarray(gen)[:, cols]
    acc = np.zeros((msg.shape[0], g.shape[1]), dtype=np.int64)
    for j in range(g.shape[0]):
        acc = (acc + np.outer(msg[:, j], g[j])) % q
    return acc


def _pack(symbols: np.ndarray, q: int) -> np.ndarray:
    code = np.zeros(symbols.shape[0], dtype=np.int64)
    for t in range(symbols.shape[1]):
        code = code * q + symbols[:, t]
    return code


def project_codes(q, gen, positions, lo, hi, out):
    gen = np.asarray(gen)
    k = gen.shape[0]
    cols = np.asarray(positions, dtype=np.int64)
    for start in range(lo, hi, _CHUNK):
        stop = min(start + _CHUNK, hi)
        msg = _digits(np.arange(start, stop, dtype=np.int64), q, k)
        out[start - lo:stop - lo] = _pack(_symbols(msg, gen, cols, q), q)


def min_weight_range(q, gen, lo, hi):
    gen = np.asarray(gen)
    k, n = gen.shape
    best = n + 1
    for start in range(lo, hi, _CHUNK):
        stop = min(start + _CHUNK, hi)
        idx = np.arange(start, stop, dtype=np.int64)
        idx = idx[idx != 0]
        if idx.size == 0:
            continue
        sym = _symbols(_digits(idx, q, k), gen, np.arange(n), q)
        best = min(best, int(np.count_nonzero(sym, axis=1).min()))
    return best


def joint_codes(q, gen, deliveries, public, n_masks, lo, hi, out):
    gen = np.asarray(gen)
    k = gen.shape[0]
    deliveries = np.asarray(deliveries, dtype=np.int64)
    public = np.asarray(public, dtype=np.int64)
    mask_states = q ** n_masks
    for start in range(lo, hi, _CHUNK):
        stop = min(start + _CHUNK, hi)
        st = np.arange(start, stop, dtype=np.int64)
        msg = _digits(st // mask_states, q, k)
        masks = _digits(st % mask_states, q, n_masks)
        masked = (_symbols(msg, gen, deliveries, q) + masks) % q
        pub = _symbols(msg, gen, public, q)
        out[start - lo:stop - lo] = _pack(np.concatenate([masked, pub], axis=1), q)


def affine_counts(q, c0, c, r0, R, lo, hi, counts):
    c = np.asarray(c, dtype=np.int64)
    r0 = np.asarray(r0, dtype=np.int64)
    R = np.asarray(R, dtype=np.int64).reshape(len(r0), len(c))
    u = len(c)
    for start in range(lo, hi, _CHUNK):
        stop = min(start + _CHUNK, hi)
        g = _digits(np.arange(start, stop, dtype=np.int64), q, u)
        ok = np.ones(g.shape[0], dtype=bool)
        for i in range(len(r0)):
            acc = np.full(g.shape[0], r0[i], dtype=np.int64)
            for j in range(u):
                acc = (acc + R[i, j] * g[:, j]) % q
            ok &= acc == 0
        acc = np.full(g.shape[0], c0, dtype=np.int64)
        for j in range(u):
            acc = (acc + c[j] * g[:, j]) % q
        counts += np.bincount(acc[ok], minlength=q)[:q].astype(np.int64)


def _flat(a, p):
    out = []
    for b in range(p):
        out.extend(i + 1 for i, x in enumerate(a) if x == b)
        out.append(0)
    return out


def partition_min(n, k):
    """See ``_core.partition_min``."""
    if n < 2:
        return None
    a = [0] * n
    mx = [0] * n
    best = None
    bnum, bden = -1, 1
    seen = ties = 0
    while True:
        p = max(a) + 1
        if p >= 2:
            seen += 1
            size = [0] * p
            for x in a:
                size[x] += 1
            num = sum(min(s, k) for s in size) - k
            den = p - 1
            if bnum < 0 or num * bden < bnum * den:
                bnum, bden, best, ties = num, den, a[:], 1
            elif num * bden == bnum * den:
                ties += 1
                if _flat(a, p) < _flat(best, max(best) + 1):
                    best = a[:]
        i = n - 1
        while i >= 1 and a[i] == mx[i] + 1:
            i -= 1
        if i == 0:
            break
        a[i] += 1
        for j in range(i + 1, n):
            a[j] = 0
            mx[j] = max(mx[j - 1], a[j - 1])
    return bnum, bden, best, seen, ties
