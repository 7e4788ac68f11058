"""
Tensor quadrature on boxes and ordered simplices.

The integrands handled here (correlation functions, Vandermonde products)
are symmetric under permutations of their arguments and polynomial on every
region where the ordering of the arguments and their position relative to
a fixed set of breakpoints is constant. Splitting the box into such regions
and mapping each ordered block onto the unit cube makes Gauss-Legendre exact
once the node count exceeds half the polynomial degree.
"""

import itertools
import logging
import math
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from salemcount.core.config import QuadratureScheme, QuadratureSpec
from salemcount.core.error_handling import InputError, ToleranceNotMet

logger = logging.getLogger(__name__)

BatchFunction = Callable[[np.ndarray], np.ndarray]

# tanh-sinh abscissae are generated on t in [-T, T]
_TANH_SINH_WINDOW = 3.0


@lru_cache(maxsize=64)
def unit_rule(n: int, scheme: QuadratureScheme = QuadratureScheme.GAUSS_LEGENDRE) -> Tuple[np.ndarray, np.ndarray]:
    """
    One-dimensional rule on [0, 1].

    Args:
        n: Number of nodes; a single node is the midpoint rule for either scheme
        scheme: Gauss-Legendre or tanh-sinh

    Returns:
        Tuple of (nodes, weights), both read-only arrays of length ``n``
    """
    if n < 1:
        raise InputError("A quadrature rule needs at least one node", additional_context={"nodes": n})
    if n == 1:
        x, w = np.zeros(1), np.full(1, 2.0)
    elif scheme is QuadratureScheme.GAUSS_LEGENDRE:
        x, w = np.polynomial.legendre.leggauss(n)
    else:
        h = 2 * _TANH_SINH_WINDOW / (n - 1)
        t = -_TANH_SINH_WINDOW + h * np.arange(n)
        s = 0.5 * math.pi * np.sinh(t)
        x = np.tanh(s)
        w = h * 0.5 * math.pi * np.cosh(t) / np.cosh(s) ** 2
    nodes = 0.5 * (x + 1.0)
    weights = 0.5 * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=32)
def tensor_rule(
    n: int, dim: int, scheme: QuadratureScheme = QuadratureScheme.GAUSS_LEGENDRE
) -> Tuple[np.ndarray, np.ndarray]:
    """Product rule on the unit cube: nodes of shape (n**dim, dim) and weights."""
    nodes, weights = unit_rule(n, scheme)
    if dim == 0:
        return np.zeros((1, 0)), np.ones(1)
    grids = np.meshgrid(*([nodes] * dim), indexing="ij")
    points = np.stack([g.reshape(-1) for g in grids], axis=-1)
    wgrids = np.meshgrid(*([weights] * dim), indexing="ij")
    w = np.prod(np.stack([g.reshape(-1) for g in wgrids], axis=-1), axis=-1)
    points.setflags(write=False)
    w.setflags(write=False)
    return points, w


def simplex_map(u: np.ndarray, lo: float, hi: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Map unit-cube points onto the ordered simplex lo <= x_1 <= ... <= x_r <= hi.

    x_r = lo + (hi - lo) u_r and x_i = lo + (x_{i+1} - lo) u_i.

    Returns:
        Tuple of (x, jacobian) with ``x`` ascending along the last axis
    """
    r = u.shape[-1]
    x = np.empty_like(u, dtype=float)
    jac = np.ones(u.shape[:-1], dtype=float)
    if r == 0:
        return x, jac
    x[..., r - 1] = lo + (hi - lo) * u[..., r - 1]
    jac = jac * (hi - lo)
    for i in range(r - 2, -1, -1):
        span = x[..., i + 1] - lo
        x[..., i] = lo + span * u[..., i]
        jac = jac * span
    return x, jac


def _cells(breaks: Sequence[float]) -> List[Tuple[float, float]]:
    return [(a, b) for a, b in zip(breaks[:-1], breaks[1:]) if b > a]


def cell_assignments(
    boxes: Sequence[Tuple[float, float]],
    extra_breaks: Sequence[float] = (),
) -> List[Dict[Tuple[float, float], List[int]]]:
    """
    Split a product of intervals into blocks of variables sharing a cell.

    Each returned mapping sends a cell (lo, hi) to the indices of the
    variables placed in it; together the mappings partition the box.
    """
    points = {float(v) for box in boxes for v in box}
    for b in extra_breaks:
        points.add(float(b))
    breaks = sorted(points)
    per_variable = []
    for lo, hi in boxes:
        lo, hi = (lo, hi) if lo <= hi else (hi, lo)
        per_variable.append([c for c in _cells(breaks) if c[0] >= lo and c[1] <= hi])
    out = []
    for combo in itertools.product(*per_variable):
        groups: Dict[Tuple[float, float], List[int]] = {}
        for var, cell in enumerate(combo):
            groups.setdefault(cell, []).append(var)
        out.append(groups)
    return out


def integrate_symmetric(
    func: BatchFunction,
    boxes: Sequence[Tuple[float, float]],
    n: int,
    scheme: QuadratureScheme = QuadratureScheme.GAUSS_LEGENDRE,
    extra_breaks: Sequence[float] = (),
    chunk_size: int = 65536,
) -> float:
    """
    Integrate a permutation-symmetric function over a box.

    Args:
        func: Maps an array of points (M, k) to values (M,)
        boxes: One (lo, hi) pair per variable
        n: Nodes per dimension
        scheme: One-dimensional rule
        extra_breaks: Additional points where ``func`` may have kinks
        chunk_size: Maximum number of points per ``func`` call

    Returns:
        Integral value
    """
    k = len(boxes)
    if k == 0:
        return float(func(np.zeros((1, 0)))[0])
    sign = 1.0
    for lo, hi in boxes:
        if hi < lo:
            sign = -sign
    u, w = tensor_rule(n, k, scheme)
    total = 0.0
    for groups in cell_assignments(boxes, extra_breaks):
        for start in range(0, len(w), chunk_size):
            uc = u[start:start + chunk_size]
            x = np.empty_like(uc)
            jac = w[start:start + chunk_size].copy()
            col = 0
            for (lo, hi), members in groups.items():
                r = len(members)
                xs, j = simplex_map(uc[:, col:col + r], lo, hi)
                x[:, members] = xs
                jac *= j * math.factorial(r)
                col += r
            total += float(np.dot(jac, func(x)))
    return sign * total


def adaptive(evaluate: Callable[[int], float], spec: QuadratureSpec, label: str = "integral") -> float:
    """
    Double the node count until successive estimates agree.

    The first estimate uses min(4, nodes - 1) nodes, so at least two rules
    are always compared.

    Raises:
        ToleranceNotMet: when ``spec.nodes`` is reached without agreement
    """
    n = min(4, spec.nodes - 1)
    previous = evaluate(n)
    while n < spec.nodes:
        n = min(2 * n, spec.nodes)
        current = evaluate(n)
        delta = abs(current - previous)
        logger.debug(f"{label}: nodes={n} value={current!r} delta={delta:.3e}")
        if delta <= spec.abs_tol:
            return current
        previous = current
    raise ToleranceNotMet(
        f"Adaptive quadrature for {label} did not converge",
        additional_context={"nodes": spec.nodes, "abs_tol": spec.abs_tol},
    )


def integrate_box(
    func: BatchFunction,
    boxes: Sequence[Tuple[float, float]],
    spec: Optional[QuadratureSpec] = None,
    extra_breaks: Sequence[float] = (),
    label: str = "integral",
) -> float:
    """Adaptive ``integrate_symmetric`` under a ``QuadratureSpec``."""
    spec = spec or QuadratureSpec()
    return adaptive(
        lambda n: integrate_symmetric(func, boxes, n, spec.scheme, extra_breaks),
        spec,
        label,
    )
