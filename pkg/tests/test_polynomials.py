"""
Tests for exact polynomial arithmetic, Sturm counting and cyclotomics.
"""

import random
from fractions import Fraction

import pytest

from salemcount.core.error_handling import (
    InputError,
    NotMonic,
    NotSelfReciprocal,
    OddDegree,
    ZeroDivisor,
    ZeroPolynomial,
)
from salemcount.core.polynomials import (
    IntPoly,
    RatPoly,
    RootInterval,
    SturmChain,
    count_roots_with_multiplicity,
    cyclotomic_indices,
    cyclotomic_poly,
    euler_phi,
    exact_divides,
    inverse_trace_transform,
    is_squarefree,
    isolate_roots,
    poly_gcd,
    squarefree_part,
    sturm_root_count,
    trace_transform,
)


def test_intpoly_normalizes_trailing_zeros() -> None:
    p = IntPoly([1, 2, 0, 0])
    assert p.coeffs == (1, 2)
    assert p.degree == 1
    assert IntPoly().degree == -1
    assert IntPoly([0, 0]).is_zero()


def test_intpoly_rejects_fractional_coefficients() -> None:
    with pytest.raises(InputError):
        IntPoly([Fraction(1, 2)])


def test_arithmetic_and_evaluation() -> None:
    a = IntPoly([1, 1])
    b = IntPoly([-1, 1])
    assert a * b == IntPoly([-1, 0, 1])
    assert (a - b) == IntPoly([2])
    assert (a * b)(3) == 8
    assert (a * b)(Fraction(1, 2)) == Fraction(-3, 4)
    mixed = a * RatPoly([Fraction(1, 2)])
    assert isinstance(mixed, RatPoly)
    assert mixed.coeffs == (Fraction(1, 2), Fraction(1, 2))


def test_divmod_recovers_dividend() -> None:
    p = RatPoly([5, -3, 0, 2, 7])
    d = RatPoly([1, 0, 3])
    q, r = divmod(p, d)
    assert q * d + r == p
    assert r.degree < d.degree


def test_antiderivative_and_integrate() -> None:
    p = RatPoly([0, 0, 3])
    assert p.antiderivative() == RatPoly([0, 0, 0, 1])
    assert p.integrate(-1, 1) == 2


@pytest.mark.parametrize(
    "p_coeffs, q_coeffs",
    [
        ([1, 0, 1], [0, 1]),
        ([1, -3, 3, -3, 1], [1, -3, 1]),
        ([1, 2, 1], [2, 1]),
    ],
)
def test_trace_transform_examples(p_coeffs, q_coeffs) -> None:
    assert trace_transform(IntPoly(p_coeffs)) == IntPoly(q_coeffs)
    assert inverse_trace_transform(IntPoly(q_coeffs)) == IntPoly(p_coeffs)


def test_inverse_trace_transform_linear() -> None:
    assert inverse_trace_transform(IntPoly([-3, 1])) == IntPoly([1, -3, 1])


def test_trace_transform_errors() -> None:
    with pytest.raises(OddDegree):
        trace_transform(IntPoly([1, 1, 1, 1]))
    with pytest.raises(NotSelfReciprocal):
        trace_transform(IntPoly([1, 2, 3]))
    with pytest.raises(NotMonic):
        trace_transform(IntPoly([2, 3, 2]))
    with pytest.raises(NotMonic):
        inverse_trace_transform(IntPoly([1, 2]))


def test_trace_round_trip_on_random_palindromes() -> None:
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(1, 5)
        low = [1] + [rng.randint(-9, 9) for _ in range(n - 1)]
        middle = [rng.randint(-9, 9)]
        p = IntPoly(low + middle + low[::-1])
        assert p.degree == 2 * n
        q = trace_transform(p)
        assert q.degree == n and q.is_monic()
        assert inverse_trace_transform(q) == p


def test_sturm_examples() -> None:
    q = IntPoly([1, -3, 1])
    assert sturm_root_count(q, RootInterval.closed(-2, 2)) == 1
    assert sturm_root_count(q, RootInterval.half_open(2, Fraction(26, 5))) == 1
    assert sturm_root_count(IntPoly([1, 0, 1]), RootInterval.closed(-2, 2)) == 0


def test_sturm_respects_endpoint_flags() -> None:
    q = IntPoly.from_roots([-2, 2])
    assert sturm_root_count(q, RootInterval.closed(-2, 2)) == 2
    assert sturm_root_count(q, RootInterval(Fraction(-2), Fraction(2), True, False)) == 1
    assert sturm_root_count(q, RootInterval(Fraction(-2), Fraction(2), False, True)) == 1
    assert sturm_root_count(q, RootInterval(Fraction(-2), Fraction(2), True, True)) == 0
    assert sturm_root_count(q, RootInterval.closed(2, 2)) == 1
    assert sturm_root_count(q, RootInterval(Fraction(2), Fraction(2), True, False)) == 0


def test_sturm_counts_distinct_roots_only() -> None:
    q = IntPoly.from_roots([1, 1, 1, -1])
    iv = RootInterval.closed(-3, 3)
    assert sturm_root_count(q, iv) == 2
    assert count_roots_with_multiplicity(q, iv) == 4


def test_sturm_zero_polynomial() -> None:
    with pytest.raises(ZeroPolynomial):
        sturm_root_count(IntPoly(), RootInterval.closed(0, 1))


def test_sturm_matches_planted_rational_roots() -> None:
    rng = random.Random(2024)
    for _ in range(1000):
        degree = rng.choice([2, 3])
        roots = [Fraction(rng.randint(-12, 12), rng.randint(1, 4)) for _ in range(degree)]
        poly = IntPoly([1])
        for r in roots:
            poly = poly * IntPoly([-r.numerator, r.denominator])
        lo = Fraction(rng.randint(-16, 15), rng.randint(1, 3))
        hi = lo + Fraction(rng.randint(0, 24), rng.randint(1, 3))
        iv = RootInterval(lo, hi, rng.random() < 0.5, rng.random() < 0.5)
        expected = len({r for r in roots if iv.contains(r)})
        assert sturm_root_count(poly, iv) == expected


def test_sturm_chain_reuse() -> None:
    chain = SturmChain(IntPoly([-2, 0, 1]))
    assert chain.count(RootInterval.closed(0, 2)) == 1
    assert chain.count(RootInterval.closed(-2, 2)) == 2
    assert not chain.value_is_zero(Fraction(7, 5))


def test_cyclotomic_examples() -> None:
    assert cyclotomic_poly(1) == IntPoly([-1, 1])
    assert cyclotomic_poly(2) == IntPoly([1, 1])
    assert cyclotomic_poly(12) == IntPoly([1, 0, -1, 0, 1])


def test_cyclotomic_product_identity() -> None:
    for d in range(1, 31):
        product = IntPoly([1])
        for e in range(1, d + 1):
            if d % e == 0:
                product = product * cyclotomic_poly(e)
        assert product == IntPoly([-1] + [0] * (d - 1) + [1])
        assert cyclotomic_poly(d).degree == euler_phi(d)
        assert cyclotomic_poly(d).is_monic()


def test_cyclotomic_indices_small() -> None:
    assert cyclotomic_indices(2) == (1, 2, 3, 4, 6)
    assert cyclotomic_indices(4) == (1, 2, 3, 4, 5, 6, 8, 10, 12)


def test_exact_divides_examples() -> None:
    assert exact_divides(IntPoly([1, 1]), IntPoly([-1, 0, 1]))
    assert exact_divides(IntPoly([1, 1, 1]), IntPoly([1, -2, -1, -2, 1]))
    assert not exact_divides(IntPoly([1, 0, 1]), IntPoly([1, -3, 3, -3, 1]))
    # divides over Q but not over Z
    assert not exact_divides(IntPoly([0, 2]), IntPoly([0, 1]))


def test_exact_divides_quotient_multiplies_back() -> None:
    d = IntPoly([1, 1, 1])
    p = IntPoly([1, -2, -1, -2, 1])
    q, r = divmod(p.to_rat(), d.to_rat())
    assert r.is_zero()
    assert q.to_int() * d == p


def test_exact_divides_by_zero() -> None:
    with pytest.raises(ZeroDivisor):
        exact_divides(IntPoly(), IntPoly([1]))


def test_squarefree_part_examples() -> None:
    assert squarefree_part(IntPoly.from_roots([1, 1])) == RatPoly([-1, 1])
    assert squarefree_part(IntPoly([1, -3, 1])) == RatPoly([1, -3, 1])
    assert squarefree_part(IntPoly.from_roots([2, 2, -1])) == RatPoly.from_roots([2, -1])
    assert is_squarefree(IntPoly([1, -3, 1]))
    assert not is_squarefree(IntPoly.from_roots([3, 3]))
    with pytest.raises(ZeroPolynomial):
        squarefree_part(RatPoly())


def test_poly_gcd_is_monic() -> None:
    a = IntPoly.from_roots([1, 2]) * 3
    b = IntPoly.from_roots([2, 5]) * 7
    assert poly_gcd(a, b) == RatPoly([-2, 1])


def test_isolate_roots_certifies_each_root() -> None:
    q = IntPoly([-2, 0, 1])
    tol = Fraction(1, 10**6)
    found = isolate_roots(q, RootInterval.closed(-2, 2), tol)
    assert len(found) == 2
    for iv in found:
        assert iv.width <= 2 * tol
        assert sturm_root_count(q, iv) == 1
    assert float(found[0].hi) < 0 < float(found[1].lo)


def test_isolate_roots_handles_exact_and_repeated_roots() -> None:
    q = IntPoly.from_roots([0, 1, 1])
    found = isolate_roots(q, RootInterval.closed(-2, 2), Fraction(1, 1000))
    assert [(iv.lo, iv.hi) for iv in found] == [(0, 0), (1, 1), (1, 1)]
