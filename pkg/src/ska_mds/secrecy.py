"""Exhaustive small-field secrecy checks.

Every state of the dealer's randomness is enumerated with equal weight and the
resulting distributions are kept as exact integer counts. Independence is then
decided by count factorisation, c(x, y) * N == c(x) * c(y) on the full product
support, so no floating-point tolerance is involved.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import budget, kernels
from .errors import BudgetExceeded, InsufficientShares, OracleDisagreement
from .field import inv_mod
from .protocol import ScenarioConfig, Share, Transcript, deal, public_discussion, refresh_reconstruct
from .rs import RsParams, build_generator

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class DistributionTable:
    """Exact joint distribution over named discrete variables.

    ``values[i, j]`` is the value of variable ``j`` in support row ``i`` and
    ``counts[i]`` its multiplicity out of ``total`` equally weighted states.
    ``base`` is the field size used for log-q units.
    """

    names: tuple[str, ...]
    radices: tuple[int, ...]
    values: np.ndarray
    counts: np.ndarray
    total: int
    base: int

    def __post_init__(self):
        if int(self.counts.sum()) != self.total:
            raise OracleDisagreement("counts do not sum to the enumerated total")

    @classmethod
    def from_columns(cls, names, radices, columns: Sequence[np.ndarray], base: int,
                     weights: np.ndarray | None = None) -> "DistributionTable":
        values, counts = _unique_rows(np.stack(columns, axis=1), radices, weights)
        total = int(counts.sum())
        return cls(tuple(names), tuple(int(r) for r in radices), values, counts, total, base)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def marginal(self, names: Iterable[str]) -> "DistributionTable":
        names = tuple(names)
        cols = [self.index(nm) for nm in names]
        radices = [self.radices[c] for c in cols]
        values, counts = _unique_rows(self.values[:, cols], radices, self.counts)
        return DistributionTable(names, tuple(radices), values, counts, self.total, self.base)

    def probabilities(self) -> list[Fraction]:
        return [Fraction(int(c), self.total) for c in self.counts]

    def outcomes(self):
        """Yield ``(canonical bytes, exact probability)`` per support point."""
        for row, c in zip(self.values, self.counts):
            key = b"|".join(str(int(v)).encode() for v in row)
            yield key, Fraction(int(c), self.total)

    def entropy_bits(self) -> float:
        c = self.counts.astype(np.float64)
        return float(math.log2(self.total) - (c * np.log2(c)).sum() / self.total)

    def entropy(self) -> float:
        """Entropy in units of log2(base)."""
        return self.entropy_bits() / math.log2(self.base)

    def __len__(self) -> int:
        return len(self.counts)


def _unique_rows(rows: np.ndarray, radices, weights=None):
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim == 1:
        rows = rows[:, None]
    if math.prod(int(r) for r in radices) < _INT64_SAFE:
        _, first, inverse = np.unique(_row_codes(rows, radices), return_index=True,
                                      return_inverse=True)
        values = rows[first]
    else:
        values, inverse = np.unique(rows, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    if weights is None:
        counts = np.bincount(inverse, minlength=len(values)).astype(np.int64)
    else:
        counts = np.bincount(inverse, weights=np.asarray(weights, dtype=np.float64),
                             minlength=len(values))
        counts = np.rint(counts).astype(np.int64)
    return values, counts


# --- joint enumeration ----------------------------------------------------


@dataclass(frozen=True)
class JointLayout:
    deliveries: tuple[int, ...]   # 1-based codeword position of each masked delivery
    public: tuple[int, ...]       # 1-based positions broadcast in the clear
    masks: int


def joint_layout(cfg: ScenarioConfig) -> JointLayout:
    deliveries = tuple(i for t in cfg.terminals if cfg.receives(t) for i in cfg.positions_for(t))
    return JointLayout(deliveries, tuple(cfg.public_positions()), len(deliveries))


def leaky_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Negative control: broadcast k symbols so the transcript determines K."""
    return replace(cfg, extra_public=cfg.symbols_per_terminal)


def enumerate_joint(cfg: ScenarioConfig, cap: int | None = None, workers: int = 1,
                    backend: str | None = None) -> DistributionTable:
    """Exact joint distribution of (secret, transcript) over all keys and masks."""
    p = cfg.params
    q, k = p.q, p.k
    layout = joint_layout(cfg)
    states = q ** (k + layout.masks)
    budget.check(states, budget.cap(budget.JOINT_CAP, cap), "joint enumeration")
    tlen = layout.masks + len(layout.public)
    if q ** (tlen + 1) >= _INT64_SAFE or q >= 1 << 31:
        raise BudgetExceeded("transcript alphabet too large to index exactly")
    gen = build_generator(p).as_array()
    codes = kernels.joint_codes(
        q, gen, [i - 1 for i in layout.deliveries], [i - 1 for i in layout.public],
        layout.masks, workers=workers, backend=backend)
    secret = np.arange(states, dtype=np.int64) // (states // q)
    return DistributionTable.from_columns(("secret", "transcript"), (q, q ** tlen),
                                          (secret, codes), base=q)


def decode_transcript_code(code: int, cfg: ScenarioConfig) -> tuple[int, ...]:
    layout = joint_layout(cfg)
    tlen = layout.masks + len(layout.public)
    q = cfg.params.q
    out = []
    for _ in range(tlen):
        code, d = divmod(code, q)
        out.append(d)
    return tuple(reversed(out))


@dataclass(frozen=True)
class MutualInformation:
    bits: float
    exact_zero: bool
    base: int

    @property
    def log_q(self) -> float:
        return self.bits / math.log2(self.base)


def factorizes(joint: DistributionTable, x: Sequence[str], y: Sequence[str]) -> bool:
    """True iff P(x, y) = P(x) P(y) holds count-for-count."""
    px = joint.marginal(x)
    py = joint.marginal(y)
    pxy = joint.marginal(tuple(x) + tuple(y))
    if len(pxy) != len(px) * len(py):
        return False
    ix = _lookup(px, pxy.values[:, :len(x)])
    iy = _lookup(py, pxy.values[:, len(x):])
    N = joint.total
    if N < 1 << 31:
        return bool(np.all(pxy.counts * N == px.counts[ix] * py.counts[iy]))
    return all(int(c) * N == int(a) * int(b)
               for c, a, b in zip(pxy.counts, px.counts[ix], py.counts[iy]))


def _lookup(table: DistributionTable, rows: np.ndarray) -> np.ndarray:
    """Row index in ``table`` of each row of ``rows`` (all must be in the support)."""
    return _index_rows(table.values, rows, table.radices)


def _index_rows(values: np.ndarray, rows: np.ndarray, radices) -> np.ndarray:
    span = math.prod(int(r) for r in radices)
    if span < _INT64_SAFE:
        keys = _row_codes(values, radices)
        order = np.argsort(keys, kind="stable")
        return order[np.searchsorted(keys, _row_codes(rows, radices), sorter=order)]
    pos = {tuple(r): i for i, r in enumerate(values.tolist())}
    return np.array([pos[tuple(r)] for r in rows.tolist()], dtype=np.int64)


def _row_codes(rows: np.ndarray, radices) -> np.ndarray:
    code = np.zeros(rows.shape[0], dtype=np.int64)
    for j, r in enumerate(radices):
        code = code * int(r) + rows[:, j]
    return code


def mutual_information(joint: DistributionTable, x: Sequence[str] = ("secret",),
                       y: Sequence[str] | None = None) -> MutualInformation:
    x = tuple(x)
    y = tuple(n for n in joint.names if n not in x) if y is None else tuple(y)
    if factorizes(joint, x, y):
        return MutualInformation(0.0, True, joint.base)
    hx = joint.marginal(x).entropy_bits()
    hy = joint.marginal(y).entropy_bits()
    hxy = joint.marginal(x + y).entropy_bits()
    return MutualInformation(max(hx + hy - hxy, 0.0), False, joint.base)


# --- code entropies --------------------------------------------------------


@dataclass(frozen=True)
class SubsetEntropy:
    positions: tuple[int, ...]
    exact: Fraction | None   # in log q units, when the distribution is uniform on q^j points
    log_q: float
    bits: float


def subset_entropy(params: RsParams, S: Iterable[int], cap: int | None = None,
                   workers: int = 1, backend: str | None = None) -> SubsetEntropy:
    """Entropy of the code symbols at positions ``S`` under a uniform message."""
    S = tuple(sorted(set(int(i) for i in S)))
    q = params.q
    if any(not 1 <= i <= params.n for i in S):
        raise ValueError(f"positions must lie in 1..{params.n}: {S}")
    if not S:
        return SubsetEntropy(S, Fraction(0), 0.0, 0.0)
    states = q ** params.k
    budget.check(states, budget.cap(budget.CODE_CAP, cap), "codeword enumeration")
    codes = kernels.project_codes(q, build_generator(params).as_array(),
                                  [i - 1 for i in S], workers=workers, backend=backend)
    _, counts = np.unique(codes, return_counts=True)
    c = counts.astype(np.float64)
    bits = float(math.log2(states) - (c * np.log2(c)).sum() / states)
    exact = None
    if np.all(counts == counts[0]):
        support = states // int(counts[0])
        j = _log_exact(support, q)
        if j is not None:
            exact = Fraction(j)
    return SubsetEntropy(S, exact, bits / math.log2(q), bits)


def _log_exact(x: int, q: int) -> int | None:
    j = 0
    while x > 1 and x % q == 0:
        x //= q
        j += 1
    return j if x == 1 else None


def codeword_distribution(params: RsParams, cap: int | None = None, workers: int = 1,
                          backend: str | None = None) -> DistributionTable:
    """Joint distribution of (Z_1, ..., Z_n) for a uniform message."""
    q, n = params.q, params.n
    states = q ** params.k
    budget.check(states, budget.cap(budget.CODE_CAP, cap), "codeword enumeration")
    gen = build_generator(params).as_array()
    cols = [kernels.project_codes(q, gen, [j], workers=workers, backend=backend)
            for j in range(n)]
    return DistributionTable.from_columns([f"z{j + 1}" for j in range(n)], [q] * n, cols, base=q)


@dataclass(frozen=True)
class Divergence:
    direct: float          # KL computed from the tables, log q units
    entropy_form: float    # sum_C H(Z_C) - H(Z_V), log q units

    @property
    def value(self) -> float:
        return self.entropy_form


def kl_divergence(joint: DistributionTable, partition, tol: float = 1e-12) -> Divergence:
    """D(P_V || prod_C P_C) both as a direct KL sum and as an entropy difference."""
    blocks = [tuple(sorted(b)) for b in getattr(partition, "blocks", partition)]
    names = joint.names
    N = joint.total
    logp = np.log2(joint.counts.astype(np.float64) / N)
    log_prod = np.zeros_like(logp)
    block_entropy = 0.0
    for block in blocks:
        cols = [names.index(f"z{i}") for i in block]
        radices = [joint.radices[c] for c in cols]
        values, counts = _unique_rows(joint.values[:, cols], radices, joint.counts)
        idx = _index_rows(values, joint.values[:, cols], radices)
        log_prod += np.log2(counts[idx].astype(np.float64) / N)
        c = counts.astype(np.float64)
        block_entropy += math.log2(N) - float((c * np.log2(c)).sum()) / N
    unit = math.log2(joint.base)
    direct = float((joint.counts / N * (logp - log_prod)).sum()) / unit
    entropy_form = block_entropy / unit - joint.entropy()
    if abs(direct - entropy_form) > tol:
        raise OracleDisagreement(
            f"direct KL {direct!r} and entropy form {entropy_form!r} differ by more than {tol}")
    return Divergence(direct, entropy_form)


# --- brute-force attack ----------------------------------------------------


@dataclass(frozen=True)
class AttackPosterior:
    counts: tuple[int, ...]     # consistent guesses per candidate secret
    guesses: int                # q^u
    unseen: tuple[int, ...]     # positions enumerated by the attacker

    @property
    def consistent(self) -> int:
        return sum(self.counts)

    @property
    def uniform(self) -> bool:
        return self.counts[0] > 0 and len(set(self.counts)) == 1

    @property
    def spike(self) -> int | None:
        """The single consistent secret, if the transcript pins one down."""
        hits = [s for s, c in enumerate(self.counts) if c]
        return hits[0] if len(hits) == 1 else None


def _lagrange_at(x: int, xs: Sequence[int], q: int) -> list[int]:
    out = []
    for b, xb in enumerate(xs):
        num = den = 1
        for j, xj in enumerate(xs):
            if j != b:
                num = num * (x - xj) % q
                den = den * (xb - xj) % q
        out.append(num * inv_mod(den, q) % q)
    return out


def attack_targets(transcript: Transcript, u: int) -> tuple[int, ...]:
    """Positions the attacker guesses.

    The lowest-numbered terminal's delivered positions come first, then the
    remaining positions not seen in the clear, in index order.
    """
    public = set(transcript.public_positions())
    first: list[int] = []
    if transcript.masked_deliveries:
        t0 = min(d.terminal for d in transcript.masked_deliveries)
        first = [d.index for d in transcript.deliveries_for(t0)]
    rest = range(1, transcript.params.n + 1)
    cand = [i for i in dict.fromkeys([*first, *rest]) if i not in public]
    if len(cand) < u:
        raise ValueError(f"transcript leaves only {len(cand)} unseen positions, u={u}")
    return tuple(sorted(cand[:u]))


def exhaustive_attack(transcript: Transcript, u: int, cap: int | None = None, workers: int = 1,
                      backend: str | None = None) -> AttackPosterior:
    """Try every assignment of the u unseen symbols and record the implied secret.

    With more than k symbols in hand an assignment only counts when all of
    them lie on one codeword, exactly as the decoder would demand.
    """
    p = transcript.params
    q, k = p.q, p.k
    guesses = q ** u
    budget.check(guesses, budget.cap(budget.ATTACK_CAP, cap), "brute-force attack")
    unseen = attack_targets(transcript, u)
    known = {s.index: s.symbol.value for s in transcript.public_symbols}
    var = {pos: j for j, pos in enumerate(unseen)}
    positions = sorted(set(known) | set(unseen))
    if len(positions) < k:
        raise InsufficientShares(f"attacker holds {len(positions)} symbols, needs {k}")
    basis, extra = positions[:k], positions[k:]
    xs = [p.alphas[i - 1] for i in basis]
    vinv = [inv_mod(p.coeffs[i - 1], q) for i in basis]

    def affine(weights):
        # sum_b weights[b] * y_b with y_b = share_b / v_b; returns (const, coeffs)
        const, coeffs = 0, [0] * u
        for b, pos in enumerate(basis):
            w = weights[b] * vinv[b] % q
            if pos in var:
                coeffs[var[pos]] = (coeffs[var[pos]] + w) % q
            else:
                const = (const + w * known[pos]) % q
        return const, coeffs

    c0, c = affine(_lagrange_at(0, xs, q))
    r0, R = [], []
    for pos in extra:
        w = [p.coeffs[pos - 1] * l % q for l in _lagrange_at(p.alphas[pos - 1], xs, q)]
        const, coeffs = affine(w)
        if pos in var:
            coeffs[var[pos]] = (coeffs[var[pos]] - 1) % q
        else:
            const = (const - known[pos]) % q
        r0.append(const)
        R.append(coeffs)
    counts = kernels.affine_counts(q, c0, c, r0, np.array(R, dtype=np.int64).reshape(len(r0), u),
                                   workers=workers, backend=backend)
    return AttackPosterior(tuple(int(x) for x in counts), guesses, unseen)


# --- key refreshment -------------------------------------------------------


@dataclass(frozen=True)
class RefreshSecrecy:
    joint: DistributionTable
    mi_old: MutualInformation
    mi_secret: MutualInformation

    @property
    def exact_zero(self) -> bool:
        return self.mi_old.exact_zero and self.mi_secret.exact_zero


def enumerate_refresh(params: RsParams, u: int, cap: int | None = None) -> RefreshSecrecy:
    """Run the refresh derivation for every (old material, fresh broadcast) pair."""
    from .protocol import _refresh_layout

    q, k = params.q, params.k
    _, public = _refresh_layout(params, u)
    states = q ** k
    budget.check(states, budget.cap(budget.CODE_CAP, cap), "refresh enumeration")
    f = params.field
    old_col, sec_col, tr_col = [], [], []
    for old in itertools.product(range(q), repeat=u):
        for fresh in itertools.product(range(q), repeat=k - u):
            t = Transcript(params, "refresh", (),
                           tuple(Share(i, f(v)) for i, v in zip(public, fresh)))
            key = refresh_reconstruct(old, t)
            old_col.append(_pack(old, q))
            sec_col.append(key.secret.value)
            tr_col.append(_pack(fresh, q))
    joint = DistributionTable.from_columns(
        ("old", "secret", "transcript"), (q ** u, q, q ** (k - u)),
        [np.array(old_col), np.array(sec_col), np.array(tr_col)], base=q)
    return RefreshSecrecy(
        joint,
        mutual_information(joint, ("old",), ("transcript",)),
        mutual_information(joint, ("secret",), ("transcript",)),
    )


def _pack(digits, q):
    code = 0
    for d in digits:
        code = code * q + d
    return code


# --- report ----------------------------------------------------------------


def secrecy_report(cfg: ScenarioConfig, cap: int | None = None, workers: int = 1,
                   backend: str | None = None) -> dict:
    """Joint enumeration, MI, subset entropies and the brute-force posterior."""
    joint = enumerate_joint(cfg, cap=cap, workers=workers, backend=backend)
    mi = mutual_information(joint)
    state, _ = deal(cfg)
    transcript = public_discussion(state)
    u = cfg.symbols_per_terminal
    attack = exhaustive_attack(transcript, u, cap=cap, workers=workers, backend=backend)
    p = cfg.params
    entropies = []
    if p.n <= 8:
        for size in range(1, p.n + 1):
            for S in itertools.combinations(range(1, p.n + 1), size):
                e = subset_entropy(p, S, cap=cap, workers=workers, backend=backend)
                entropies.append({
                    "positions": [str(i) for i in S],
                    "entropy_log_q": _fraction_json(e.exact) if e.exact is not None else e.log_q,
                    "expected_log_q": str(min(size, p.k)),
                })
    return {
        "config": cfg.to_dict(),
        "joint_states": str(joint.total),
        "mi_bits": mi.bits,
        "mi_exact_zero": mi.exact_zero,
        "subset_entropies": entropies,
        "attack_posterior": [str(c) for c in attack.counts],
        "attack_unseen_positions": [str(i) for i in attack.unseen],
        "attack_uniform": attack.uniform,
    }


def _fraction_json(x: Fraction) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator), "unit": "log2(q)"}
