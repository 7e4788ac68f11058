"""
Exact univariate polynomial arithmetic.

``IntPoly`` and ``RatPoly`` store coefficients in ascending degree order as
Python ``int`` / ``fractions.Fraction`` values, so every test used during
classification (palindromes, Sturm sign counts, cyclotomic divisibility) is
decided exactly.
"""

from __future__ import annotations

import logging
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, List, Sequence, Tuple, Union

import numpy as np

from salemcount.core.error_handling import (
    InputError,
    NotMonic,
    NotSelfReciprocal,
    OddDegree,
    ZeroDivisor,
    ZeroPolynomial,
)

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


def _strip(coeffs: List[Any]) -> Tuple[Any, ...]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class _Poly:
    """Shared behaviour of the exact polynomial types."""

    __slots__ = ("coeffs",)

    coeffs: Tuple[Any, ...]

    def __init__(self, coeffs: Iterable[Any] = ()) -> None:
        self.coeffs = _strip([self._coerce(c) for c in coeffs])

    @staticmethod
    def _coerce(value: Any) -> Any:  # pragma: no cover - overridden
        raise NotImplementedError

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Any:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __call__(self, x: Any) -> Any:
        acc: Any = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other: object) -> bool:
        if isinstance(other, _Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _strip([other])
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({list(self.coeffs)!r})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                body = str(abs(c))
            else:
                mag = "" if abs(c) == 1 else str(abs(c))
                body = mag + ("t" if i == 1 else f"t^{i}")
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def to_float_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs], dtype=float)


class IntPoly(_Poly):
    """Polynomial with arbitrary-precision integer coefficients."""

    __slots__ = ()

    @staticmethod
    def _coerce(value: Any) -> int:
        if isinstance(value, Fraction):
            if value.denominator != 1:
                raise InputError(
                    "IntPoly coefficients must be integers",
                    additional_context={"coefficient": str(value)},
                )
            return int(value)
        if isinstance(value, numbers.Integral) and not isinstance(value, bool):
            return int(value)
        if not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            raise InputError(
                "IntPoly coefficients must be integers",
                additional_context={"coefficient": repr(value)},
            )
        return value

    @classmethod
    def from_roots(cls, roots: Sequence[int]) -> "IntPoly":
        out = cls([1])
        for r in roots:
            out = out * cls([-r, 1])
        return out

    @classmethod
    def monomial(cls, degree: int, coeff: int = 1) -> "IntPoly":
        return cls([0] * degree + [coeff])

    def to_rat(self) -> "RatPoly":
        return RatPoly(self.coeffs)

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def derivative(self) -> "IntPoly":
        return IntPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def reversed(self) -> "IntPoly":
        """Coefficient reversal t^deg P(1/t)."""
        return IntPoly(self.coeffs[::-1])

    def is_palindrome(self) -> bool:
        return self.coeffs == self.coeffs[::-1]

    def __add__(self, other: Any) -> Any:
        if isinstance(other, int):
            other = IntPoly([other])
        if isinstance(other, IntPoly):
            return IntPoly(_add(self.coeffs, other.coeffs))
        return self.to_rat() + other

    __radd__ = __add__

    def __neg__(self) -> "IntPoly":
        return IntPoly([-c for c in self.coeffs])

    def __sub__(self, other: Any) -> Any:
        return self + (-other)

    def __rsub__(self, other: Any) -> Any:
        return (-self) + other

    def __mul__(self, other: Any) -> Any:
        if isinstance(other, int):
            return IntPoly([c * other for c in self.coeffs])
        if isinstance(other, IntPoly):
            return IntPoly(_mul(self.coeffs, other.coeffs))
        return self.to_rat() * other

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "IntPoly":
        out = IntPoly([1])
        for _ in range(exponent):
            out = out * self
        return out


class RatPoly(_Poly):
    """Polynomial with exact rational coefficients."""

    __slots__ = ()

    @staticmethod
    def _coerce(value: Any) -> Fraction:
        if isinstance(value, float):
            raise InputError(
                "RatPoly coefficients must be exact",
                additional_context={"coefficient": repr(value)},
            )
        return Fraction(value)

    @classmethod
    def from_roots(cls, roots: Sequence[Rational]) -> "RatPoly":
        out = cls([1])
        for r in roots:
            out = out * cls([-Fraction(r), 1])
        return out

    def to_rat(self) -> "RatPoly":
        return self

    def to_int(self) -> IntPoly:
        """Convert to ``IntPoly``; raises when a coefficient is not integral."""
        return IntPoly(self.coeffs)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def monic(self) -> "RatPoly":
        if self.is_zero():
            return self
        lead = self.leading
        return RatPoly([c / lead for c in self.coeffs])

    def primitive(self) -> IntPoly:
        """Positive rational multiple with coprime integer coefficients."""
        if self.is_zero():
            return IntPoly()
        denom = 1
        for c in self.coeffs:
            denom = denom * c.denominator // math.gcd(denom, c.denominator)
        ints = [int(c * denom) for c in self.coeffs]
        g = 0
        for c in ints:
            g = math.gcd(g, c)
        return IntPoly([c // g for c in ints])

    def derivative(self) -> "RatPoly":
        return RatPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def antiderivative(self) -> "RatPoly":
        """Antiderivative vanishing at zero."""
        return RatPoly([Fraction(0)] + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def integrate(self, lo: Rational, hi: Rational) -> Fraction:
        anti = self.antiderivative()
        return Fraction(anti(Fraction(hi)) - anti(Fraction(lo)))

    def __add__(self, other: Any) -> "RatPoly":
        other = _as_rat(other)
        return RatPoly(_add(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self) -> "RatPoly":
        return RatPoly([-c for c in self.coeffs])

    def __sub__(self, other: Any) -> "RatPoly":
        return self + (-_as_rat(other))

    def __rsub__(self, other: Any) -> "RatPoly":
        return _as_rat(other) + (-self)

    def __mul__(self, other: Any) -> "RatPoly":
        if isinstance(other, (int, Fraction)):
            return RatPoly([c * other for c in self.coeffs])
        other = _as_rat(other)
        return RatPoly(_mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "RatPoly":
        out = RatPoly([1])
        for _ in range(exponent):
            out = out * self
        return out

    def __divmod__(self, other: Any) -> Tuple["RatPoly", "RatPoly"]:
        divisor = _as_rat(other)
        if divisor.is_zero():
            raise ZeroDivisor("Division by the zero polynomial")
        rem = list(self.coeffs)
        dd = divisor.degree
        lead = divisor.leading
        if len(rem) - 1 < dd:
            return RatPoly(), RatPoly(rem)
        quot = [Fraction(0)] * (len(rem) - dd)
        for shift in range(len(rem) - 1 - dd, -1, -1):
            coef = rem[shift + dd] / lead
            quot[shift] = coef
            if coef:
                for i, d in enumerate(divisor.coeffs):
                    rem[shift + i] -= coef * d
        return RatPoly(quot), RatPoly(rem[:dd])

    def __floordiv__(self, other: Any) -> "RatPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: Any) -> "RatPoly":
        return divmod(self, other)[1]


PolyLike = Union[IntPoly, RatPoly]


def _as_rat(value: Any) -> RatPoly:
    if isinstance(value, RatPoly):
        return value
    if isinstance(value, IntPoly):
        return value.to_rat()
    if isinstance(value, (int, Fraction)):
        return RatPoly([value])
    raise InputError(
        "Unsupported polynomial operand",
        additional_context={"type": type(value).__name__},
    )


def _add(a: Sequence[Any], b: Sequence[Any]) -> List[Any]:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _mul(a: Sequence[Any], b: Sequence[Any]) -> List[Any]:
    if not a or not b:
        return []
    out: List[Any] = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@dataclass(frozen=True)
class RootInterval:
    """A real interval with rational endpoints and per-endpoint openness."""

    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise InputError(
                "Interval endpoints out of order",
                additional_context={"lo": str(self.lo), "hi": str(self.hi)},
            )

    @classmethod
    def closed(cls, lo: Rational, hi: Rational) -> "RootInterval":
        return cls(Fraction(lo), Fraction(hi), False, False)

    @classmethod
    def half_open(cls, lo: Rational, hi: Rational) -> "RootInterval":
        """The interval (lo, hi]."""
        return cls(Fraction(lo), Fraction(hi), True, False)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Rational) -> bool:
        x = Fraction(x)
        above = x > self.lo if self.lo_open else x >= self.lo
        below = x < self.hi if self.hi_open else x <= self.hi
        return above and below

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo}, {self.hi}{right}"


def _sign(value: int) -> int:
    return (value > 0) - (value < 0)


def _homogeneous_sign(coeffs: Sequence[int], x: Fraction) -> int:
    """Sign of an integer polynomial at p/q (q > 0) without leaving the integers."""
    p, q = x.numerator, x.denominator
    acc = coeffs[-1]
    qpow = 1
    # accumulates q^d P(p/q)
    for c in reversed(coeffs[:-1]):
        qpow *= q
        acc = acc * p + c * qpow
    return _sign(acc)


class SturmChain:
    """
    Sturm sequence of the square-free part of a polynomial.

    Every element is stored as a primitive integer polynomial (rescaled by a
    positive constant, which preserves signs), so evaluation at a rational
    point reduces to integer arithmetic.
    """

    def __init__(self, poly: PolyLike):
        rat = _as_rat(poly)
        if rat.is_zero():
            raise ZeroPolynomial("Sturm chain of the zero polynomial")
        self.squarefree = squarefree_part(rat)
        chain: List[RatPoly] = [self.squarefree, self.squarefree.derivative()]
        while not chain[-1].is_zero() and chain[-1].degree > 0:
            rem = chain[-2] % chain[-1]
            if rem.is_zero():
                break
            chain.append(-rem)
        self._chain: List[Tuple[int, ...]] = [
            p.primitive().coeffs for p in chain if not p.is_zero()
        ]

    def __len__(self) -> int:
        return len(self._chain)

    def value_is_zero(self, x: Rational) -> bool:
        return _homogeneous_sign(self._chain[0], Fraction(x)) == 0

    def sign_changes(self, x: Rational) -> int:
        x = Fraction(x)
        changes = 0
        last = 0
        for coeffs in self._chain:
            s = _homogeneous_sign(coeffs, x)
            if s == 0:
                continue
            if last and s != last:
                changes += 1
            last = s
        return changes

    def count(self, iv: RootInterval) -> int:
        """Number of distinct real roots in ``iv``."""
        if self.squarefree.degree <= 0:
            return 0
        if iv.lo == iv.hi:
            if iv.lo_open or iv.hi_open:
                return 0
            return 1 if self.value_is_zero(iv.lo) else 0
        # V(lo) - V(hi) counts roots in (lo, hi].
        total = self.sign_changes(iv.lo) - self.sign_changes(iv.hi)
        if not iv.lo_open and self.value_is_zero(iv.lo):
            total += 1
        if iv.hi_open and self.value_is_zero(iv.hi):
            total -= 1
        return total


def trace_transform(poly: PolyLike) -> IntPoly:
    """
    Map a self-reciprocal P of degree 2n to Q with P(t) = t^n Q(t + 1/t).

    Writes P(t)/t^n = a_n + sum_k a_{n+k} (t^k + t^-k) and replaces each
    t^k + t^-k by its Chebyshev-type polynomial V_k(z).
    """
    p = _to_int_poly(poly)
    if p.is_zero():
        raise ZeroPolynomial("Cannot transform the zero polynomial")
    if p.degree % 2:
        raise OddDegree(
            "Self-reciprocal transform needs even degree",
            additional_context={"degree": p.degree},
        )
    if not p.is_palindrome():
        raise NotSelfReciprocal(
            "Coefficients are not a palindrome",
            additional_context={"coeffs": list(p.coeffs)},
        )
    if not p.is_monic():
        raise NotMonic("Polynomial is not monic", additional_context={"leading": p.leading})

    n = p.degree // 2
    q = IntPoly([p.coeffs[n]])
    v_prev, v_cur = IntPoly([2]), IntPoly([0, 1])
    for k in range(1, n + 1):
        q = q + v_cur * p.coeffs[n + k]
        v_prev, v_cur = v_cur, IntPoly([0, 1]) * v_cur - v_prev
    return q


def inverse_trace_transform(poly: PolyLike) -> IntPoly:
    """Inverse of ``trace_transform``: P(t) = sum_k q_k t^(n-k) (t^2+1)^k."""
    q = _to_int_poly(poly)
    if not q.is_monic():
        raise NotMonic("Trace polynomial is not monic", additional_context={"leading": q.leading})
    n = q.degree
    out = IntPoly()
    base = IntPoly([1, 0, 1])
    power = IntPoly([1])
    for k, qk in enumerate(q.coeffs):
        if qk:
            out = out + IntPoly.monomial(n - k, qk) * power
        power = power * base
    return out


def poly_gcd(a: PolyLike, b: PolyLike) -> RatPoly:
    """Monic greatest common divisor (zero when both inputs are zero)."""
    x, y = _as_rat(a), _as_rat(b)
    while not y.is_zero():
        x, y = y, x % y
    return x.monic()


def squarefree_part(poly: PolyLike) -> RatPoly:
    """Q / gcd(Q, Q'), normalized to be monic."""
    q = _as_rat(poly)
    if q.is_zero():
        raise ZeroPolynomial("Square-free part of the zero polynomial")
    if q.degree == 0:
        return RatPoly([1])
    g = poly_gcd(q, q.derivative())
    return (q // g).monic()


def sturm_root_count(poly: PolyLike, iv: RootInterval) -> int:
    """Exact number of distinct real roots of ``poly`` in ``iv``."""
    return SturmChain(poly).count(iv)


def multiplicity_chain(poly: PolyLike) -> List[RatPoly]:
    """Q_0 = Q, Q_{k+1} = gcd(Q_k, Q_k') down to a constant."""
    q = _as_rat(poly)
    if q.is_zero():
        raise ZeroPolynomial("Multiplicity chain of the zero polynomial")
    chain = [q.monic()]
    while chain[-1].degree > 0:
        chain.append(poly_gcd(chain[-1], chain[-1].derivative()))
    return chain[:-1]


def count_roots_with_multiplicity(poly: PolyLike, iv: RootInterval) -> int:
    """Real roots in ``iv`` counted with multiplicity."""
    return sum(sturm_root_count(p, iv) for p in multiplicity_chain(poly))


def is_squarefree(poly: PolyLike) -> bool:
    q = _as_rat(poly)
    if q.is_zero():
        raise ZeroPolynomial("Square-free test of the zero polynomial")
    return poly_gcd(q, q.derivative()).degree <= 0


@lru_cache(maxsize=None)
def cyclotomic_poly(d: int) -> IntPoly:
    """Phi_d obtained by dividing t^d - 1 by Phi_e for every proper divisor e."""
    if d < 1:
        raise InputError("Cyclotomic index must be positive", additional_context={"d": d})
    num = RatPoly([-1] + [0] * (d - 1) + [1])
    for e in range(1, d):
        if d % e == 0:
            quot, rem = divmod(num, cyclotomic_poly(e).to_rat())
            num = quot
    return num.to_int()


def exact_divides(divisor: PolyLike, poly: PolyLike) -> bool:
    """True iff poly = divisor * R with R integral."""
    d = _as_rat(divisor)
    if d.is_zero():
        raise ZeroDivisor("Divisibility by the zero polynomial")
    quot, rem = divmod(_as_rat(poly), d)
    return rem.is_zero() and quot.is_integral()


@lru_cache(maxsize=None)
def euler_phi(d: int) -> int:
    if d < 1:
        raise InputError("Euler phi needs a positive argument", additional_context={"d": d})
    result, n, p = d, d, 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


@lru_cache(maxsize=None)
def cyclotomic_indices(max_degree: int) -> Tuple[int, ...]:
    """All d with phi(d) <= max_degree, ascending."""
    if max_degree < 1:
        return ()
    # phi(d) >= sqrt(d / 2)
    limit = 2 * max_degree * max_degree + 2
    return tuple(d for d in range(1, limit + 1) if euler_phi(d) <= max_degree)


def isolate_roots(poly: PolyLike, iv: RootInterval, tol: Rational) -> List[RootInterval]:
    """
    Certified isolating intervals for the real roots of ``poly`` inside ``iv``.

    Each returned interval contains exactly one distinct root and has width at
    most ``2 * tol``; exact rational roots come back as degenerate intervals.
    Intervals are ascending and repeated according to root multiplicity.
    """
    tol_q = Fraction(tol)
    if tol_q <= 0:
        raise InputError("Isolation tolerance must be positive", additional_context={"tol": str(tol)})
    chains = [SturmChain(p) for p in multiplicity_chain(poly)]
    base = chains[0]

    pending = [iv]
    isolated: List[RootInterval] = []
    while pending:
        cur = pending.pop()
        n = base.count(cur)
        if n == 0:
            continue
        if n > 1:
            mid = cur.midpoint
            pending.append(RootInterval(mid, cur.hi, True, cur.hi_open))
            pending.append(RootInterval(cur.lo, mid, cur.lo_open, False))
            continue
        isolated.append(_refine(base, cur, tol_q))

    isolated.sort(key=lambda r: (r.lo, r.hi))
    out: List[RootInterval] = []
    for r in isolated:
        mult = sum(1 for c in chains if c.count(r) > 0)
        out.extend([r] * max(mult, 1))
    return out


def _refine(chain: SturmChain, iv: RootInterval, tol: Fraction) -> RootInterval:
    if not iv.lo_open and chain.value_is_zero(iv.lo):
        return RootInterval.closed(iv.lo, iv.lo)
    if not iv.hi_open and chain.value_is_zero(iv.hi):
        return RootInterval.closed(iv.hi, iv.hi)
    lo, hi = iv.lo, iv.hi
    # root is now strictly inside (lo, hi)
    while hi - lo > 2 * tol:
        mid = (lo + hi) / 2
        if chain.value_is_zero(mid):
            return RootInterval.closed(mid, mid)
        if chain.sign_changes(lo) - chain.sign_changes(mid) == 1:
            hi = mid
        else:
            lo = mid
    return RootInterval(lo, hi, True, True)


def _to_int_poly(poly: PolyLike) -> IntPoly:
    if isinstance(poly, IntPoly):
        return poly
    if isinstance(poly, RatPoly):
        if not poly.is_integral():
            raise InputError(
                "Polynomial has non-integer coefficients",
                additional_context={"coeffs": [str(c) for c in poly.coeffs]},
            )
        return poly.to_int()
    return IntPoly(poly)
