"""Generalized Reed-Solomon codec: generator matrix, encoder, erasure decoder."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import budget
from .errors import (
    InconsistentShares,
    InsufficientShares,
    InvalidParams,
    LengthMismatch,
    MismatchedField,
)
from .field import FieldElement, FieldSpec, horner, interpolate_ints, inv_mod


@dataclass(frozen=True)
class RsParams:
    """An (n, k) GRS code over F_q with evaluation points and column coefficients."""

    field: FieldSpec
    n: int
    k: int
    alphas: tuple[int, ...]
    coeffs: tuple[int, ...]

    def __post_init__(self):
        q = self.field.modulus
        if not 1 <= self.k <= self.n <= q - 1:
            raise InvalidParams(
                f"need 1 <= k <= n <= q-1, got k={self.k}, n={self.n}, q={q}")
        if len(self.alphas) != self.n or len(self.coeffs) != self.n:
            raise InvalidParams("alphas and coeffs must each have n entries")
        if any(not 0 < a < q for a in self.alphas):
            raise InvalidParams(f"evaluation points must be nonzero residues: {self.alphas}")
        if len(set(self.alphas)) != self.n:
            raise InvalidParams(f"evaluation points not pairwise distinct: {self.alphas}")
        if any(not 0 < v < q for v in self.coeffs):
            raise InvalidParams(f"column coefficients must be nonzero residues: {self.coeffs}")

    @classmethod
    def create(cls, q: int, n: int, k: int, alphas: Sequence[int] | None = None,
               coeffs: Sequence[int] | None = None) -> "RsParams":
        """Plain RS defaults: alpha_i = i, v_i = 1."""
        f = q if isinstance(q, FieldSpec) else FieldSpec(q)
        alphas = tuple(range(1, n + 1)) if alphas is None else tuple(int(a) for a in alphas)
        coeffs = (1,) * n if coeffs is None else tuple(int(v) for v in coeffs)
        return cls(f, n, k, alphas, coeffs)

    @property
    def q(self) -> int:
        return self.field.modulus

    @property
    def distance(self) -> int:
        return self.n - self.k + 1

    @cached_property
    def coeff_inverses(self) -> tuple[int, ...]:
        return tuple(inv_mod(v, self.q) for v in self.coeffs)


@dataclass(frozen=True)
class GeneratorMatrix:
    rows: tuple[tuple[int, ...], ...]
    field: FieldSpec

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64)

    def elements(self) -> list[list[FieldElement]]:
        return [[self.field(x) for x in row] for row in self.rows]


@dataclass(frozen=True)
class KeyBlock:
    """Message m = (s, u_1, ..., u_{k-1}); the secret is coordinate 0."""

    secret: FieldElement
    pads: tuple[FieldElement, ...] = ()

    @classmethod
    def from_ints(cls, field: FieldSpec, values: Sequence[int]) -> "KeyBlock":
        if not values:
            raise LengthMismatch("a key block needs at least the secret")
        return cls(field(values[0]), tuple(field(v) for v in values[1:]))

    @property
    def field(self) -> FieldSpec:
        return self.secret.field

    def ints(self) -> list[int]:
        return [self.secret.value] + [p.value for p in self.pads]

    def __len__(self) -> int:
        return 1 + len(self.pads)


@dataclass(frozen=True)
class Share:
    index: int          # 1-based codeword position
    symbol: FieldElement


@dataclass(frozen=True)
class Codeword:
    symbols: tuple[FieldElement, ...]

    def ints(self) -> list[int]:
        return [s.value for s in self.symbols]

    def shares(self, indices: Iterable[int] | None = None) -> list[Share]:
        if indices is None:
            indices = range(1, len(self.symbols) + 1)
        return [Share(i, self.symbols[i - 1]) for i in indices]


def build_generator(params: RsParams) -> GeneratorMatrix:
    q = params.q
    rows = tuple(
        tuple(v * pow(a, i, q) % q for a, v in zip(params.alphas, params.coeffs))
        for i in range(params.k)
    )
    if _rank(rows, q) != params.k:
        raise InvalidParams("generator matrix is not full rank")
    return GeneratorMatrix(rows, params.field)


def _rank(rows, q: int) -> int:
    m = [list(r) for r in rows]
    rank, cols = 0, len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] % q), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = inv_mod(m[rank][c], q)
        m[rank] = [x * inv % q for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][c] % q:
                f = m[r][c]
                m[r] = [(x - f * y) % q for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def encode_ints(message: Sequence[int], params: RsParams) -> list[int]:
    q = params.q
    return [v * horner(message, a, q) % q for a, v in zip(params.alphas, params.coeffs)]


def encode(key: KeyBlock, params: RsParams) -> Codeword:
    if len(key) != params.k:
        raise LengthMismatch(f"key block has length {len(key)}, code dimension is {params.k}")
    if key.field != params.field:
        raise MismatchedField(f"key over {key.field}, code over {params.field}")
    f = params.field
    return Codeword(tuple(f(z) for z in encode_ints(key.ints(), params)))


def decode_ints(shares: dict[int, int], params: RsParams) -> list[int]:
    """Erasure decode from ``{position: symbol}``; returns the message coefficients.

    The lexicographically smallest k positions are interpolated and any
    remaining shares must lie on the same codeword.
    """
    q, k = params.q, params.k
    if len(shares) < k:
        raise InsufficientShares(f"{len(shares)} distinct shares, threshold is {k}")
    for idx in shares:
        if not 1 <= idx <= params.n:
            raise InvalidParams(f"share index {idx} outside [1, {params.n}]")
    order = sorted(shares)
    basis = order[:k]
    xs = [params.alphas[i - 1] for i in basis]
    inv = params.coeff_inverses
    ys = [shares[i] * inv[i - 1] % q for i in basis]
    message = interpolate_ints(xs, ys, q)
    for i in order[k:]:
        expected = params.coeffs[i - 1] * horner(message, params.alphas[i - 1], q) % q
        if expected != shares[i] % q:
            raise InconsistentShares(f"share at position {i} does not lie on the codeword")
    return message


def decode(shares: Iterable[Share], params: RsParams) -> KeyBlock:
    table: dict[int, int] = {}
    for sh in shares:
        if sh.symbol.field != params.field:
            raise MismatchedField(f"share over {sh.symbol.field}, code over {params.field}")
        prev = table.setdefault(sh.index, sh.symbol.value)
        if prev != sh.symbol.value:
            raise InconsistentShares(f"two different symbols for position {sh.index}")
    return KeyBlock.from_ints(params.field, decode_ints(table, params))


@dataclass(frozen=True)
class DistanceReport:
    n: int
    k: int
    q: int
    distance: int
    singleton: int
    codewords: int = field(default=0)

    @property
    def is_mds(self) -> bool:
        return self.distance == self.singleton


def verify_mds_distance(params: RsParams, cap: int | None = None,
                        workers: int = 1) -> DistanceReport:
    """Exhaustive minimum distance over all q^k codewords.

    For a linear code the minimum pairwise distance equals the minimum
    weight of a nonzero codeword, which is what the kernel scans.
    """
    from .kernels import min_weight

    states = params.q ** params.k
    budget.check(states, budget.cap(budget.CODE_CAP, cap), "codeword enumeration")
    d = min_weight(params.q, build_generator(params).as_array(), workers=workers)
    return DistanceReport(params.n, params.k, params.q, d, params.distance, states)
