"""
Correlation kernel of the Jacobi beta=1 ensemble.

Builds the skew-orthogonal system attached to the constant weight on [-1, 1]
in exact rational arithmetic, assembles the 2x2 block kernel

    [[ I_N(x, y),  S_N(y, x) ],
     [-S_N(x, y), -D_N(x, y) ]]

as exact bivariate polynomials (plus the -1/2 sign(x - y) term of I_N), and
evaluates k-point correlation functions and angle densities as Pfaffians.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from salemcount.core.config import QuadratureSpec
from salemcount.core.error_handling import (
    DuplicatePoints,
    InputError,
    OddDimension,
    OutOfDomain,
    UnsupportedM,
    UnsupportedParams,
)
from salemcount.core.polynomials import RatPoly

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]

_T2_MINUS_1 = RatPoly([-1, 0, 1])


# ---------------------------------------------------------------------------
# Jacobi polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JacobiPoly:
    n: int
    a: int
    b: int
    poly: RatPoly

    def __call__(self, x: Any) -> Any:
        return self.poly(x)


@lru_cache(maxsize=None)
def jacobi_poly(n: int, a: int, b: int) -> JacobiPoly:
    """
    P_n^{(a,b)} with exact rational coefficients.

    Uses the finite sum over ((t - 1)/2)^k; all gamma values are factorials
    because ``a`` and ``b`` are non-negative integers.
    """
    if n < 0 or a < 0 or b < 0:
        raise UnsupportedParams(
            "Jacobi parameters must be non-negative integers",
            additional_context={"n": n, "a": a, "b": b},
        )
    half_shift = RatPoly([Fraction(-1, 2), Fraction(1, 2)])
    prefactor = Fraction(math.factorial(a + n), math.factorial(n) * math.factorial(a + b + n))
    total = RatPoly()
    power = RatPoly([1])
    for k in range(n + 1):
        coef = Fraction(math.comb(n, k) * math.factorial(a + b + n + k), math.factorial(a + k))
        total = total + power * coef
        power = power * half_shift
    return JacobiPoly(n, a, b, total * prefactor)


def jacobi_norm(j: int, a: int, b: int) -> Fraction:
    """h_j^{(a,b)} = integral of w(a,b;x) P_j(x)^2 over [-1, 1]."""
    if j < 0 or a < 0 or b < 0:
        raise UnsupportedParams("Jacobi parameters must be non-negative", additional_context={"j": j})
    return Fraction(
        2 ** (a + b + 1) * math.factorial(j + a) * math.factorial(j + b),
        (2 * j + a + b + 1) * math.factorial(j) * math.factorial(j + a + b),
    )


def jacobi_weight(a: int, b: int) -> RatPoly:
    """(1 - x)^a (1 + x)^b."""
    return RatPoly([1, -1]) ** a * RatPoly([1, 1]) ** b


# ---------------------------------------------------------------------------
# Skew-orthogonal system
# ---------------------------------------------------------------------------


def skew_transform(f: RatPoly) -> RatPoly:
    """psi_f(t) = 1/2 * integral of sign(t - x) f(x) over [-1, 1]."""
    anti = f.antiderivative()
    return anti - RatPoly([(anti(1) + anti(-1)) / 2])


def skew_product(f: RatPoly, g: RatPoly) -> Fraction:
    """<f, g> = integral of psi_f(y) g(y) over [-1, 1]; antisymmetric in f, g."""
    return (skew_transform(f) * g).integrate(-1, 1)


@dataclass(frozen=True)
class SkewSystem:
    """Skew-orthogonal polynomials R_j and their sign transforms psi_j for N points."""

    N: int
    c: int
    R_even: Tuple[RatPoly, ...]
    R_odd: Tuple[RatPoly, ...]
    psi_even: Tuple[RatPoly, ...]
    psi_odd: Tuple[RatPoly, ...]
    r: Tuple[Fraction, ...]
    # lone polynomial completing the system when N is odd
    extra: Optional[RatPoly] = None

    @property
    def pairs(self) -> int:
        return len(self.r)


@lru_cache(maxsize=None)
def skew_system(N: int) -> SkewSystem:
    if N < 1:
        raise InputError("Skew system needs N >= 1", additional_context={"N": N})
    c = N % 2
    s = (N - c) // 2
    r_even, r_odd, psi_even, psi_odd, r = [], [], [], [], []
    for j in range(s):
        p11 = jacobi_poly(2 * j + c, 1, 1).poly
        r_even.append(p11)
        r_odd.append((_T2_MINUS_1 * p11).derivative())
        p00 = jacobi_poly(2 * j + 1 + c, 0, 0).poly
        psi_even.append((p00 - c) * Fraction(2, 2 * j + 2 + c))
        psi_odd.append(_T2_MINUS_1 * p11)
        r.append(Fraction(8 * (2 * j + 1 + c), (4 * j + 3 + 2 * c) * (2 * j + 2 + c)))
    extra = jacobi_poly(N - 1, 1, 1).poly * Fraction(N + 1, 4) if c else None
    return SkewSystem(
        N=N,
        c=c,
        R_even=tuple(r_even),
        R_odd=tuple(r_odd),
        psi_even=tuple(psi_even),
        psi_odd=tuple(psi_odd),
        r=tuple(r),
        extra=extra,
    )


# ---------------------------------------------------------------------------
# Bivariate polynomials
# ---------------------------------------------------------------------------


class BiPoly:
    """Exact bivariate polynomial sum c_ij x^i y^j."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Tuple[int, int], Rational]] = None) -> None:
        self.terms: Dict[Tuple[int, int], Fraction] = {
            k: Fraction(v) for k, v in (terms or {}).items() if v != 0
        }

    @classmethod
    def outer(cls, f: RatPoly, g: RatPoly) -> "BiPoly":
        """f(x) g(y)."""
        return cls({(i, j): a * b for i, a in enumerate(f.coeffs) for j, b in enumerate(g.coeffs)})

    @classmethod
    def of_x(cls, f: RatPoly) -> "BiPoly":
        return cls.outer(f, RatPoly([1]))

    @classmethod
    def of_y(cls, g: RatPoly) -> "BiPoly":
        return cls.outer(RatPoly([1]), g)

    def __add__(self, other: "BiPoly") -> "BiPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return BiPoly(out)

    def __neg__(self) -> "BiPoly":
        return BiPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __mul__(self, scalar: Rational) -> "BiPoly":
        return BiPoly({k: v * scalar for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"BiPoly({dict(sorted(self.terms.items()))!r})"

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree_x(self) -> int:
        return max((i for i, _ in self.terms), default=-1)

    @property
    def degree_y(self) -> int:
        return max((j for _, j in self.terms), default=-1)

    def d_dx(self) -> "BiPoly":
        return BiPoly({(i - 1, j): i * v for (i, j), v in self.terms.items() if i})

    def d_dy(self) -> "BiPoly":
        return BiPoly({(i, j - 1): j * v for (i, j), v in self.terms.items() if j})

    def antiderivative_x(self) -> "BiPoly":
        """Antiderivative in x vanishing on x = 0."""
        return BiPoly({(i + 1, j): v / (i + 1) for (i, j), v in self.terms.items()})

    def swap(self) -> "BiPoly":
        """p(y, x)."""
        return BiPoly({(j, i): v for (i, j), v in self.terms.items()})

    def subs_x(self, value: Rational) -> RatPoly:
        """p(value, y) as a polynomial in y."""
        coeffs = [Fraction(0)] * (self.degree_y + 1)
        value = Fraction(value)
        for (i, j), v in self.terms.items():
            coeffs[j] += v * value**i
        return RatPoly(coeffs)

    def subs_y(self, value: Rational) -> RatPoly:
        return self.swap().subs_x(value)

    def diagonal(self) -> RatPoly:
        """p(x, x)."""
        coeffs = [Fraction(0)] * (self.degree_x + self.degree_y + 1)
        for (i, j), v in self.terms.items():
            coeffs[i + j] += v
        return RatPoly(coeffs)

    def __call__(self, x: Rational, y: Rational) -> Fraction:
        """Exact evaluation at rational points."""
        return sum((v * Fraction(x) ** i * Fraction(y) ** j for (i, j), v in self.terms.items()), Fraction(0))

    def coefficient_matrix(self) -> np.ndarray:
        mat = np.zeros((max(self.degree_x, 0) + 1, max(self.degree_y, 0) + 1))
        for (i, j), v in self.terms.items():
            mat[i, j] = float(v)
        return mat

    def evaluate(self, x: Any, y: Any) -> np.ndarray:
        """Vectorized float evaluation with broadcasting."""
        xb, yb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return np.polynomial.polynomial.polyval2d(xb, yb, self.coefficient_matrix())


# ---------------------------------------------------------------------------
# Kernel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelSet:
    """
    Exact blocks of K_N.

    ``I_smooth`` already includes the -(c/2) P_N^{(0,0)}(x) term; the
    remaining -1/2 sign(x - y) is applied by ``I`` at evaluation time.
    """

    N: int
    S: BiPoly
    D: BiPoly
    I_smooth: BiPoly
    _matrices: Dict[str, np.ndarray] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        for name in ("S", "D", "I_smooth"):
            self._matrices[name] = getattr(self, name).coefficient_matrix()

    def _eval(self, name: str, x: Any, y: Any) -> np.ndarray:
        xb, yb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return np.polynomial.polynomial.polyval2d(xb, yb, self._matrices[name])

    def s(self, x: Any, y: Any) -> np.ndarray:
        return self._eval("S", x, y)

    def d(self, x: Any, y: Any) -> np.ndarray:
        return self._eval("D", x, y)

    def i(self, x: Any, y: Any) -> np.ndarray:
        xb, yb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return self._eval("I_smooth", xb, yb) - 0.5 * np.sign(xb - yb)

    def density(self) -> RatPoly:
        """One-point function S_N(x, x)."""
        return self.S.diagonal()

    def block_matrix(self, points: np.ndarray) -> np.ndarray:
        """
        Skew matrices for a batch of point tuples.

        Args:
            points: Array of shape (M, k)

        Returns:
            Array of shape (M, 2k, 2k) built from the upper triangle only
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        m, k = pts.shape
        xi = pts[:, :, None]
        xj = pts[:, None, :]
        full = np.zeros((m, 2 * k, 2 * k))
        full[:, 0::2, 0::2] = self.i(xi, xj)
        full[:, 0::2, 1::2] = self.s(xj, xi)
        full[:, 1::2, 0::2] = -self.s(xi, xj)
        full[:, 1::2, 1::2] = -self.d(xi, xj)
        upper = np.triu(full, 1)
        return upper - np.swapaxes(upper, -1, -2)

    def correlation(self, points: np.ndarray) -> np.ndarray:
        """R_k for each row of ``points`` (no validation)."""
        return pfaffian_batch(self.block_matrix(points))


@lru_cache(maxsize=None)
def build_kernel(N: int) -> KernelSet:
    system = skew_system(N)
    S = BiPoly()
    for j in range(system.pairs):
        term = BiPoly.outer(system.R_odd[j], system.psi_even[j]) - BiPoly.outer(system.R_even[j], system.psi_odd[j])
        S = S + term * (1 / system.r[j])
    if system.extra is not None:
        S = S + BiPoly.of_x(system.extra)

    D = -S.d_dy()

    anti = S.antiderivative_x()
    half_sign_integral = anti - BiPoly.of_y((anti.subs_x(1) + anti.subs_x(-1)) * Fraction(1, 2))
    I_smooth = half_sign_integral
    if system.c:
        I_smooth = I_smooth - BiPoly.of_x(jacobi_poly(N, 0, 0).poly * Fraction(1, 2))

    logger.debug(f"Built kernel N={N}: deg_x(S)={S.degree_x} deg_y(S)={S.degree_y}")
    return KernelSet(N=N, S=S, D=D, I_smooth=I_smooth)


# ---------------------------------------------------------------------------
# Pfaffians
# ---------------------------------------------------------------------------


class SkewMatrix:
    """Skew-symmetric matrix kept as its strict upper triangle."""

    __slots__ = ("upper",)

    def __init__(self, matrix: Any) -> None:
        arr = np.asarray(matrix, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InputError("Skew matrix must be square", additional_context={"shape": arr.shape})
        self.upper = np.triu(arr, 1)

    @property
    def dim(self) -> int:
        return int(self.upper.shape[0])

    def dense(self) -> np.ndarray:
        return self.upper - self.upper.T


def pfaffian_batch(matrices: np.ndarray) -> np.ndarray:
    """
    Pfaffians of a stack of skew-symmetric matrices.

    Skew Gaussian elimination with pivoting on the largest entry of the
    current row; every row/column swap flips the sign.
    """
    a = np.array(matrices, dtype=float, copy=True)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise InputError("Pfaffian needs square matrices", additional_context={"shape": a.shape})
    n = a.shape[-1]
    if n % 2:
        raise OddDimension("Pfaffian of an odd-dimensional matrix", additional_context={"dim": n})
    batch_shape = a.shape[:-2]
    a = a.reshape((-1, n, n))
    pf = np.ones(a.shape[0])
    rows = np.arange(a.shape[0])

    for k in range(0, n - 1, 2):
        pivot = k + 1 + np.argmax(np.abs(a[:, k, k + 1:]), axis=-1)
        swap = pivot != k + 1
        if np.any(swap):
            perm = np.tile(np.arange(n), (a.shape[0], 1))
            perm[rows, k + 1] = pivot
            perm[rows, pivot] = k + 1
            a = np.take_along_axis(a, perm[:, :, None], axis=1)
            a = np.take_along_axis(a, perm[:, None, :], axis=2)
            pf = np.where(swap, -pf, pf)

        head = a[:, k, k + 1]
        singular = head == 0
        pf = pf * head
        if k + 2 < n:
            safe = np.where(singular, 1.0, head)
            tau = a[:, k, k + 2:] / safe[:, None]
            v = a[:, k + 1, k + 2:]
            a[:, k + 2:, k + 2:] -= tau[:, :, None] * v[:, None, :] - v[:, :, None] * tau[:, None, :]

    return pf.reshape(batch_shape)


def pfaffian(matrix: Union[SkewMatrix, np.ndarray, Sequence[Sequence[float]]]) -> float:
    dense = matrix.dense() if isinstance(matrix, SkewMatrix) else SkewMatrix(matrix).dense()
    if dense.shape[0] == 0:
        return 1.0
    return float(pfaffian_batch(dense))


def pfaffian_expansion(matrix: Union[SkewMatrix, np.ndarray]) -> float:
    """Expansion along the first row; small matrices only."""
    dense = matrix.dense() if isinstance(matrix, SkewMatrix) else SkewMatrix(matrix).dense()
    n = dense.shape[0]
    if n % 2:
        raise OddDimension("Pfaffian of an odd-dimensional matrix", additional_context={"dim": n})
    if n > 6:
        raise UnsupportedParams("Expansion is limited to dimension 6", additional_context={"dim": n})
    return _expand(dense, list(range(n)))


def _expand(a: np.ndarray, idx: List[int]) -> float:
    if not idx:
        return 1.0
    first, rest = idx[0], idx[1:]
    total = 0.0
    for pos, j in enumerate(rest):
        sub = rest[:pos] + rest[pos + 1:]
        total += (-1) ** pos * a[first, j] * _expand(a, sub)
    return total


# ---------------------------------------------------------------------------
# Correlation functions and densities
# ---------------------------------------------------------------------------


def _validate_points(points: Iterable[float]) -> np.ndarray:
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 1 or pts.size == 0:
        raise InputError("Expected a non-empty list of points")
    if np.any(pts <= -1.0) or np.any(pts >= 1.0):
        raise OutOfDomain("Points must lie in (-1, 1)", additional_context={"points": pts.tolist()})
    if len(np.unique(pts)) != len(pts):
        raise DuplicatePoints("Correlation points must be distinct", additional_context={"points": pts.tolist()})
    return pts


def correlation_k(N: int, points: Sequence[float]) -> float:
    """k-point correlation function R_k of the N-point ensemble."""
    pts = _validate_points(points)
    if pts.size > N:
        raise InputError("More points than particles", additional_context={"N": N, "k": int(pts.size)})
    return float(build_kernel(N).correlation(pts[None, :])[0])


def rho_batch(m: int, thetas: np.ndarray) -> np.ndarray:
    """Angle density for rows of ``thetas`` of shape (M, k), unvalidated."""
    th = np.atleast_2d(np.asarray(thetas, dtype=float))
    return np.prod(np.sin(th), axis=-1) * build_kernel(m).correlation(-np.cos(th))


def rho_density(m: int, k: int, thetas: Sequence[float]) -> float:
    """
    Joint density of k conjugate angles of degree-(2m+2) Salem numbers.

    Uses the substitution x = -cos(theta).
    """
    th = np.asarray(list(thetas), dtype=float)
    if not 1 <= k <= m or th.size != k:
        raise InputError("Need 1 <= k <= m angles", additional_context={"m": m, "k": k, "given": int(th.size)})
    if np.any(th <= 0) or np.any(th >= math.pi):
        raise OutOfDomain("Angles must lie in (0, pi)", additional_context={"thetas": th.tolist()})
    _validate_points(-np.cos(th))
    return float(rho_batch(m, th[None, :])[0])


def rho_closed_form(m: int, theta: Any) -> Any:
    """Printed one-angle densities for m = 2, 3, 4."""
    t = np.asarray(theta, dtype=float)
    c2 = np.cos(t) ** 2
    if m == 2:
        out = 0.75 * np.sin(t) * (c2 + 1)
    elif m == 3:
        out = 0.375 * np.sin(t) * (5 * c2**2 + 3)
    elif m == 4:
        out = (5 / 32) * np.sin(t) * (35 * c2**3 - 21 * c2**2 + 9 * c2 + 9)
    else:
        raise UnsupportedM("Closed forms exist for m in {2, 3, 4}", additional_context={"m": m})
    return float(out) if out.ndim == 0 else out


def correlation_direct(N: int, points: Sequence[float], q: Optional[QuadratureSpec] = None) -> float:
    """
    R_k by integrating the joint density over the remaining N - k points.

    Independent of the kernel; used to check it.
    """
    from salemcount.core.asymptotics import jacobi_partition
    from salemcount.core.quadrature import integrate_box

    pts = _validate_points(points)
    k = pts.size
    if k > N:
        raise InputError("More points than particles", additional_context={"N": N, "k": int(k)})
    fixed_vdm = float(np.prod([abs(a - b) for a, b in itertools.combinations(pts, 2)]))
    prefactor = math.factorial(N) / math.factorial(N - k) / float(jacobi_partition(N))
    if k == N:
        return prefactor * fixed_vdm

    def integrand(free: np.ndarray) -> np.ndarray:
        out = np.full(free.shape[0], fixed_vdm)
        for i in range(free.shape[1]):
            out *= np.prod(np.abs(free[:, i:i + 1] - pts[None, :]), axis=1)
            for j in range(i + 1, free.shape[1]):
                out *= np.abs(free[:, i] - free[:, j])
        return out

    boxes = [(-1.0, 1.0)] * (N - k)
    return prefactor * integrate_box(integrand, boxes, q, extra_breaks=pts.tolist(), label="correlation_direct")
