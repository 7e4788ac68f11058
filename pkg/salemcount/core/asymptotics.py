"""
Leading constants, Selberg integrals, the coefficient-map Jacobian and
volume estimates behind the Salem-number counting asymptotics.
"""

import logging
import math
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from salemcount.core.census import IntervalSpec, coefficient_map
from salemcount.core.config import McEstimate, McSpec, QuadratureSpec
from salemcount.core.error_handling import (
    BoundTooSmall,
    DomainError,
    InputError,
    SingularStencil,
)
from salemcount.core.kernel import build_kernel
from salemcount.core.quadrature import adaptive, integrate_box, integrate_symmetric, unit_rule

logger = logging.getLogger(__name__)

Rational = Fraction


# ---------------------------------------------------------------------------
# Leading constant
# ---------------------------------------------------------------------------


def omega_leading(m: int) -> Fraction:
    """omega_m = 2^{m(m+1)} / (m+1) * prod_{k<m} k!^2 / (2k+1)!."""
    if m < 1:
        raise InputError("m must be at least 1", additional_context={"m": m})
    out = Fraction(2 ** (m * (m + 1)), m + 1)
    for k in range(m):
        out *= Fraction(math.factorial(k) ** 2, math.factorial(2 * k + 1))
    return out


# ---------------------------------------------------------------------------
# Selberg integrals
# ---------------------------------------------------------------------------


def _check_selberg_domain(n: int, alpha: float, beta: float, gamma: float) -> None:
    if n < 1:
        raise DomainError("Selberg dimension must be positive", additional_context={"n": n})
    limit = 1.0 / n
    if n > 1:
        limit = min(limit, alpha / (n - 1), beta / (n - 1))
    if alpha <= 0 or beta <= 0 or gamma <= -limit:
        raise DomainError(
            "Selberg parameters outside the convergence region",
            additional_context={"n": n, "alpha": alpha, "beta": beta, "gamma": gamma},
        )


def _selberg_arguments(n: int, alpha: float, beta: float, gamma: float):
    """Numerator and denominator gamma arguments of the closed form."""
    num, den = [], []
    for j in range(n):
        num += [alpha + j * gamma, beta + j * gamma, 1 + (j + 1) * gamma]
        den += [alpha + beta + (n + j - 1) * gamma, 1 + gamma]
    return num, den


def selberg_closed(n: int, alpha: float, beta: float, gamma: float) -> float:
    """
    S_n(alpha, beta, gamma) from its gamma-product closed form.

    Evaluated through log-gamma so large n does not overflow.
    """
    _check_selberg_domain(n, alpha, beta, gamma)
    num, den = _selberg_arguments(n, alpha, beta, gamma)
    return float(np.exp(np.sum(gammaln(num)) - np.sum(gammaln(den))))


def _half_integer_gamma(twice: int) -> Tuple[Fraction, int]:
    """Gamma(twice / 2) as (rational part, power of sqrt(pi))."""
    if twice <= 0:
        raise DomainError("Gamma argument must be positive", additional_context={"argument": twice / 2})
    if twice % 2 == 0:
        return Fraction(math.factorial(twice // 2 - 1)), 0
    k = (twice - 1) // 2
    return Fraction(math.factorial(2 * k), 4**k * math.factorial(k)), 1


def _twice(value: Fraction) -> Optional[int]:
    doubled = 2 * Fraction(value)
    return int(doubled) if doubled.denominator == 1 else None


def selberg_exact(n: int, alpha: Fraction, beta: Fraction, gamma: Fraction) -> Optional[Fraction]:
    """
    Exact S_n when 2*alpha, 2*beta, 2*gamma are integers and the powers of
    sqrt(pi) cancel; ``None`` otherwise.
    """
    a, b, g = Fraction(alpha), Fraction(beta), Fraction(gamma)
    _check_selberg_domain(n, float(a), float(b), float(g))
    if None in (_twice(a), _twice(b), _twice(g)):
        return None
    num, den = _selberg_arguments(n, a, b, g)
    value = Fraction(1)
    pi_power = 0
    for arg in num:
        part, p = _half_integer_gamma(int(2 * arg))
        value *= part
        pi_power += p
    for arg in den:
        part, p = _half_integer_gamma(int(2 * arg))
        value /= part
        pi_power -= p
    return value if pi_power == 0 else None


def _chunked_mc(draw: Callable[[np.random.Generator, int], np.ndarray], mc: McSpec) -> Tuple[float, float]:
    """Mean and standard error over Philox substreams spawned from one seed."""
    n_chunks = -(-mc.samples // mc.chunk_size)
    streams = np.random.SeedSequence(mc.seed).spawn(n_chunks)
    total = 0.0
    total_sq = 0.0
    remaining = mc.samples
    for stream in streams:
        size = min(mc.chunk_size, remaining)
        values = draw(np.random.Generator(np.random.Philox(stream)), size)
        total += float(values.sum())
        total_sq += float(np.dot(values, values))
        remaining -= size
    mean = total / mc.samples
    var = max(total_sq / mc.samples - mean * mean, 0.0)
    stderr = math.sqrt(var / mc.samples) if mc.samples > 1 else float("inf")
    return mean, stderr


def _vandermonde_abs(x: np.ndarray) -> np.ndarray:
    out = np.ones(x.shape[0])
    for i in range(x.shape[1]):
        for j in range(i + 1, x.shape[1]):
            out *= np.abs(x[:, i] - x[:, j])
    return out


def selberg_monte_carlo(n: int, alpha: float, beta: float, gamma: float, mc: McSpec) -> McEstimate:
    """Plain Monte-Carlo of the defining integral over [0, 1]^n."""
    _check_selberg_domain(n, alpha, beta, gamma)

    def draw(rng: np.random.Generator, size: int) -> np.ndarray:
        t = rng.random((size, n))
        weight = np.prod(t ** (alpha - 1) * (1 - t) ** (beta - 1), axis=1)
        return weight * _vandermonde_abs(t) ** (2 * gamma)

    mean, stderr = _chunked_mc(draw, mc)
    return McEstimate(estimate=mean, stderr=stderr, samples=mc.samples, seed=mc.seed)


def _selberg_half(n: int) -> Fraction:
    """S_n(1, 1, 1/2), which is always rational."""
    if n < 1:
        raise InputError("Dimension must be at least 1", additional_context={"n": n})
    s = selberg_exact(n, Fraction(1), Fraction(1), Fraction(1, 2))
    if s is None:
        raise InputError("S_n(1, 1, 1/2) has no exact rational value", additional_context={"n": n})
    return s


def omega_via_selberg(m: int) -> Fraction:
    """2^{m(m+1)} / (m+1)! * S_m(1, 1, 1/2)."""
    s = _selberg_half(m)
    return Fraction(2 ** (m * (m + 1)), math.factorial(m + 1)) * s


def jacobi_partition(N: int) -> Fraction:
    """Z_N = integral over [-1, 1]^N of prod |x_i - x_j|."""
    s = _selberg_half(N)
    return 2 ** (N * (N + 1) // 2) * s


# ---------------------------------------------------------------------------
# Jacobian of the coefficient map
# ---------------------------------------------------------------------------


def jacobian_batch(y: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Closed-form Jacobian for y of shape (M,) and thetas of shape (M, m)."""
    y = np.asarray(y, dtype=float)
    th = np.atleast_2d(np.asarray(thetas, dtype=float))
    m = th.shape[1]
    cos = np.cos(th)
    out = 2.0 ** (m * (m + 1) / 2) * (1.0 - y**-2)
    out = out * np.prod((y + 1.0 / y)[:, None] - 2.0 * cos, axis=1)
    out = out * np.prod(np.sin(th), axis=1)
    return out * _vandermonde_abs(cos)


def jacobian_closed(y: float, thetas: Sequence[float]) -> float:
    """
    |d(a_1..a_{m+1}) / d(y, theta_1..theta_m)|

    = 2^{m(m+1)/2} (1 - y^-2) prod(y + 1/y - 2 cos theta_l) prod sin theta_l
      prod_{i<j} |cos theta_i - cos theta_j|
    """
    if not y > 1:
        raise DomainError("y must exceed 1", additional_context={"y": y})
    th = np.asarray(list(thetas), dtype=float)
    if np.any(th < 0) or np.any(th > math.pi):
        raise DomainError("Angles must lie in [0, pi]", additional_context={"thetas": th.tolist()})
    return float(jacobian_batch(np.array([y]), th[None, :])[0])


def jacobian_numeric(y: float, thetas: Sequence[float], h: float = 1e-5) -> float:
    """|det| of the central-difference Jacobian of ``coefficient_map``."""
    th = [float(t) for t in thetas]
    if not (h > 0 and math.isfinite(h)) or y + h == y:
        raise SingularStencil("Step size underflows", additional_context={"h": h, "y": y})
    if y - h <= 1 or any(t - h < 0 or t + h > math.pi for t in th):
        raise SingularStencil("Stencil leaves the domain", additional_context={"h": h, "y": y})
    point = [float(y)] + th
    cols = []
    for i in range(len(point)):
        up = list(point)
        down = list(point)
        up[i] += h
        down[i] -= h
        diff = np.subtract(coefficient_map(up[0], up[1:]), coefficient_map(down[0], down[1:]))
        cols.append(diff / (2 * h))
    return float(abs(np.linalg.det(np.column_stack(cols))))


# ---------------------------------------------------------------------------
# Density integrals and volumes
# ---------------------------------------------------------------------------


def integrate_rho(m: int, k: int, iv: IntervalSpec, q: Optional[QuadratureSpec] = None) -> float:
    """
    Integral of the k-angle density over the box I_1 x ... x I_k.

    k = 1 uses the exact antiderivative of S_m(x, x) in x = -cos(theta);
    k >= 2 integrates R_k in x-space by adaptive tensor quadrature.
    """
    iv.validate(m)
    if iv.k != k:
        raise InputError("Interval count must equal k", additional_context={"k": k, "intervals": iv.k})
    kernel = build_kernel(m)
    if k == 1:
        anti = kernel.density().antiderivative()
        (lo, hi), = iv.x_boxes()
        return float(anti(hi) - anti(lo))
    return integrate_box(kernel.correlation, iv.x_boxes(), q, label=f"rho_{m},{k}")


def mc_volume(m: int, H: float, mc: McSpec) -> McEstimate:
    """
    Monte-Carlo estimate of the volume of the coefficient region.

    y is uniform on (1, H] and the angles are sorted uniforms, so the sample
    space is (1, H] times the ordered simplex of [0, pi]^m.
    """
    H = float(H)
    if H <= 1:
        raise BoundTooSmall("Bound must exceed 1", additional_context={"H": H})
    measure = (H - 1.0) * math.pi**m / math.factorial(m)

    def draw(rng: np.random.Generator, size: int) -> np.ndarray:
        r = rng.random((size, m + 1))
        y = 1.0 + (H - 1.0) * (1.0 - r[:, 0])
        thetas = np.sort(math.pi * r[:, 1:], axis=1)
        return jacobian_batch(y, thetas)

    mean, stderr = _chunked_mc(draw, mc)
    logger.debug(f"mc_volume m={m} H={H}: mean jacobian {mean:.6g} +/- {stderr:.2g}")
    return McEstimate(estimate=measure * mean, stderr=measure * stderr, samples=mc.samples, seed=mc.seed)


def volume_quadrature(m: int, H: float, q: Optional[QuadratureSpec] = None) -> float:
    """
    Deterministic volume in the variables x_0 = y + 1/y, x_l = -cos(theta_l):
    2^{m(m+1)/2} / m! times the integral of prod(x_0 + 2 x_l) prod|x_i - x_j|
    over [2, H + 1/H] x [-1, 1]^m.

    The convergence test runs on the volume divided by (H + 1/H)^(m+1), so
    ``abs_tol`` bounds the error relative to the leading growth.
    """
    H = float(H)
    if H <= 1:
        raise BoundTooSmall("Bound must exceed 1", additional_context={"H": H})
    q = q or QuadratureSpec()
    big = H + 1.0 / H
    scale = 2.0 ** (m * (m + 1) / 2) / math.factorial(m)

    def evaluate(n: int) -> float:
        nodes, weights = unit_rule(n, q.scheme)
        total = 0.0
        for u, w in zip(nodes, weights):
            x0 = 2.0 + (big - 2.0) * u

            def inner(x: np.ndarray, x0: float = x0) -> np.ndarray:
                return np.prod(x0 + 2.0 * x, axis=1) * _vandermonde_abs(x)

            total += w * (big - 2.0) * integrate_symmetric(inner, [(-1.0, 1.0)] * m, n, q.scheme)
        return scale * total / big ** (m + 1)

    return adaptive(evaluate, q, label=f"volume m={m}") * big ** (m + 1)
