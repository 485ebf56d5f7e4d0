import pytest
from hypothesis import given, settings, strategies as st

from ska_mds.errors import DuplicateAbscissa, InvalidParams, MismatchedField, WrongCount, ZeroInverse
from ska_mds.field import (
    FieldSpec,
    Polynomial,
    eval_poly,
    field_arith,
    field_inv,
    interpolate,
    inv_mod,
    is_prime,
)

F5, F7 = FieldSpec(5), FieldSpec(7)
SMALL_PRIMES = [5, 7, 11, 13]


def trial_division(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def test_arith_examples():
    assert field_arith("add", F5(3), F5(4)) == F5(2)
    assert field_arith("sub", F7(2), F7(6)) == F7(3)
    for q in SMALL_PRIMES:
        f = FieldSpec(q)
        for x in f.elements():
            assert field_arith("mul", f(0), x) == f(0)


def test_inverse_examples():
    assert field_inv(F7(3)) == F7(5)
    for q in SMALL_PRIMES:
        assert field_inv(FieldSpec(q)(1)) == FieldSpec(q)(1)
    with pytest.raises(ZeroInverse):
        field_inv(F5(0))


def test_mismatched_fields_rejected():
    with pytest.raises(MismatchedField):
        F5(1) + F7(1)
    with pytest.raises(MismatchedField):
        eval_poly(Polynomial.from_ints(F5, [1, 2]), F7(1))


def test_primality_matches_trial_division():
    for n in range(-3, 3000):
        assert is_prime(n) == trial_division(n), n


def test_primality_64bit():
    assert is_prime((1 << 61) - 1)
    assert is_prime(18446744073709551557)  # largest 64-bit prime
    assert not is_prime(3215031751)        # strong pseudoprime to bases 2, 3, 5, 7
    assert not is_prime(((1 << 31) - 1) * ((1 << 31) - 1))


def test_fieldspec_validation():
    for bad in (0, 1, 4, 9, 1 << 64):
        with pytest.raises(InvalidParams):
            FieldSpec(bad)
    FieldSpec(18446744073709551557)


def test_large_modulus_products_exact():
    q = 18446744073709551557
    f = FieldSpec(q)
    a, b = f(q - 1), f(q - 2)
    assert (a * b).value == ((q - 1) * (q - 2)) % q
    assert (a * a.inverse()).value == 1


def test_interpolate_example():
    pts = [(F7(2), F7(0)), (F7(3), F7(2))]
    p = interpolate(pts, 2)
    assert p.ints() == [3, 2]
    # oracle: evaluating the result reproduces the points
    for x, y in pts:
        assert eval_poly(p, x) == y


def test_interpolate_single_point_is_constant():
    for a in range(1, 7):
        assert interpolate([(F7(a), F7(4))], 1).ints() == [4]


def test_interpolate_errors():
    with pytest.raises(DuplicateAbscissa):
        interpolate([(F7(2), F7(0)), (F7(2), F7(1))], 2)
    with pytest.raises(WrongCount):
        interpolate([(F7(2), F7(0))], 2)


def test_eval_examples():
    p = Polynomial.from_ints(F7, [3, 2])
    assert eval_poly(p, F7(1)) == F7(5)
    assert eval_poly(p, F7(0)) == F7(3)
    assert eval_poly(Polynomial.from_ints(F7, []), F7(4)) == F7(0)
    assert eval_poly(Polynomial.from_ints(F7, [0, 0, 0]), F7(4)) == F7(0)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(SMALL_PRIMES), st.data())
def test_field_axioms(q, data):
    f = FieldSpec(q)
    a, b, c = (f(data.draw(st.integers(0, q - 1))) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a and a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - b + b == a
    if a.value:
        assert field_inv(field_inv(a)) == a
        assert (a * a.inverse()).value == 1
        assert inv_mod(a.value, q) == pow(a.value, q - 2, q)


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(SMALL_PRIMES), st.data())
def test_interpolate_inverts_evaluation(q, data):
    f = FieldSpec(q)
    k = data.draw(st.integers(1, q - 1))
    coeffs = data.draw(st.lists(st.integers(0, q - 1), min_size=k, max_size=k))
    xs = data.draw(st.lists(st.integers(1, q - 1), min_size=k, max_size=k, unique=True))
    poly = Polynomial.from_ints(f, coeffs)
    pts = [(f(x), eval_poly(poly, f(x))) for x in xs]
    back = interpolate(pts, k)
    assert back.ints() == coeffs
    for x, y in pts:
        assert eval_poly(back, x) == y
