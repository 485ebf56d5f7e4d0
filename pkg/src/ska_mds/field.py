"""Prime-field arithmetic and polynomial interpolation over F_q."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import (
    DuplicateAbscissa,
    InvalidParams,
    MismatchedField,
    WrongCount,
    ZeroInverse,
)

MAX_MODULUS = 1 << 64

# Deterministic for every n < 3.3e24, which covers the 64-bit cap.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test valid for 64-bit inputs."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def inv_mod(a: int, q: int) -> int:
    """Inverse of ``a`` modulo ``q``."""
    a %= q
    if a == 0:
        raise ZeroInverse(f"0 has no inverse in F_{q}")
    try:
        return pow(a, -1, q)
    except ValueError:
        raise ZeroInverse(f"{a} is not invertible modulo {q}") from None


@dataclass(frozen=True)
class FieldSpec:
    """The prime field F_q."""

    modulus: int

    def __post_init__(self):
        q = self.modulus
        if not isinstance(q, int) or isinstance(q, bool):
            raise InvalidParams(f"modulus must be an integer, got {q!r}")
        if q < 2 or q >= MAX_MODULUS:
            raise InvalidParams(f"modulus must satisfy 2 <= q < 2^64, got {q}")
        if not is_prime(q):
            raise InvalidParams(f"modulus {q} is not prime")

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value % self.modulus, self)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    def elements(self) -> Iterable["FieldElement"]:
        return (FieldElement(v, self) for v in range(self.modulus))

    def __repr__(self) -> str:
        return f"F_{self.modulus}"


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: FieldSpec

    def __post_init__(self):
        if not 0 <= self.value < self.field.modulus:
            raise InvalidParams(
                f"residue {self.value} outside [0, {self.field.modulus})")

    def _check(self, other: "FieldElement") -> int:
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field != self.field:
            raise MismatchedField(f"{self.field} vs {other.field}")
        return self.field.modulus

    def __add__(self, other):
        q = self._check(other)
        if q is NotImplemented:
            return q
        return FieldElement((self.value + other.value) % q, self.field)

    def __sub__(self, other):
        q = self._check(other)
        if q is NotImplemented:
            return q
        return FieldElement((self.value - other.value) % q, self.field)

    def __mul__(self, other):
        q = self._check(other)
        if q is NotImplemented:
            return q
        return FieldElement(self.value * other.value % q, self.field)

    def __truediv__(self, other):
        q = self._check(other)
        if q is NotImplemented:
            return q
        return self * other.inverse()

    def __neg__(self):
        return FieldElement(-self.value % self.field.modulus, self.field)

    def inverse(self) -> "FieldElement":
        return FieldElement(inv_mod(self.value, self.field.modulus), self.field)

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.modulus})"


def field_arith(op: str, a: FieldElement, b: FieldElement) -> FieldElement:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown field operation {op!r}")


def field_inv(a: FieldElement) -> FieldElement:
    return a.inverse()


@dataclass(frozen=True)
class Polynomial:
    """Polynomial over F_q with coefficients in ascending degree."""

    coefficients: tuple[FieldElement, ...]
    field: FieldSpec

    def __post_init__(self):
        for c in self.coefficients:
            if c.field != self.field:
                raise MismatchedField(f"coefficient {c!r} not in {self.field}")

    @classmethod
    def from_ints(cls, field: FieldSpec, coeffs: Iterable[int]) -> "Polynomial":
        return cls(tuple(field(c) for c in coeffs), field)

    def ints(self) -> list[int]:
        return [c.value for c in self.coefficients]

    def __call__(self, x: FieldElement) -> FieldElement:
        return eval_poly(self, x)

    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        for d in range(len(self.coefficients) - 1, -1, -1):
            if self.coefficients[d].value:
                return d
        return -1


def horner(coeffs: Sequence[int], x: int, q: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % q
    return acc


def eval_poly(p: Polynomial, x: FieldElement) -> FieldElement:
    if x.field != p.field:
        raise MismatchedField(f"{x!r} not in {p.field}")
    q = p.field.modulus
    return FieldElement(horner(p.ints(), x.value, q), p.field)


def interpolate_ints(xs: Sequence[int], ys: Sequence[int], q: int) -> list[int]:
    """Coefficients (ascending) of the unique degree < len(xs) polynomial
    through ``(xs[i], ys[i])``, computed in Lagrange form."""
    basis = _lagrange_basis(tuple(x % q for x in xs), q)
    k = len(basis)
    coeffs = [0] * k
    for row, yi in zip(basis, ys):
        if yi % q:
            for d in range(k):
                coeffs[d] += row[d] * yi
    return [c % q for c in coeffs]


@lru_cache(maxsize=4096)
def _lagrange_basis(xs: tuple[int, ...], q: int) -> tuple[tuple[int, ...], ...]:
    # row i holds the coefficients of L_i(x) = prod_{j != i} (x - x_j) / (x_i - x_j)
    k = len(xs)
    # master(x) = prod (x - x_j); each basis numerator is master / (x - x_i)
    master = [1]
    for xj in xs:
        nxt = [0] * (len(master) + 1)
        for d, c in enumerate(master):
            nxt[d + 1] = (nxt[d + 1] + c) % q
            nxt[d] = (nxt[d] - xj * c) % q
        master = nxt
    rows = []
    for i, xi in enumerate(xs):
        # synthetic division of master by (x - xi)
        num = [0] * k
        carry = 0
        for d in range(k, 0, -1):
            carry = (master[d] + carry * xi) % q if d < k else master[d]
            num[d - 1] = carry
        denom = 1
        for j, xj in enumerate(xs):
            if j != i:
                denom = denom * (xi - xj) % q
        scale = inv_mod(denom, q)
        rows.append(tuple(scale * c % q for c in num))
    return tuple(rows)


def interpolate(points: Sequence[tuple[FieldElement, FieldElement]],
                target_degree_bound: int) -> Polynomial:
    """Unique polynomial of degree < ``target_degree_bound`` through ``points``."""
    if len(points) != target_degree_bound:
        raise WrongCount(
            f"need exactly {target_degree_bound} points, got {len(points)}")
    if not points:
        raise WrongCount("cannot interpolate through zero points")
    field = points[0][0].field
    for x, y in points:
        if x.field != field or y.field != field:
            raise MismatchedField("interpolation points span several fields")
    xs = [x.value for x, _ in points]
    if len(set(xs)) != len(xs):
        raise DuplicateAbscissa(f"abscissae not pairwise distinct: {xs}")
    ys = [y.value for _, y in points]
    return Polynomial.from_ints(field, interpolate_ints(xs, ys, field.modulus))
