"""
Census of Salem numbers of fixed degree.

A Salem number of degree 2m + 2 is encoded by the trace polynomial
Q(z) = z^{m+1} + b_1 z^m + ... + b_{m+1} of its minimal polynomial P, which
has m roots 2 cos(theta_i) in [-2, 2] and one root y + 1/y > 2. The census
walks every integer Q compatible with a height bound H, classifies each one
exactly and keeps a record per irreducible class member.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from salemcount.core.config import CensusConfig, parse_angle
from salemcount.core.error_handling import (
    BoundTooSmall,
    DegreeMismatch,
    DomainError,
    InputError,
    LayoutViolation,
    OverlappingIntervals,
    ToleranceNotMet,
)
from salemcount.core.polynomials import (
    IntPoly,
    RootInterval,
    SturmChain,
    count_roots_with_multiplicity,
    cyclotomic_indices,
    cyclotomic_poly,
    exact_divides,
    inverse_trace_transform,
    is_squarefree,
    isolate_roots,
    trace_transform,
)

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]

# Roots farther than this from the admissible region are rejected before the
# exact Sturm test; the exact test decides everything closer.
PREFILTER_MARGIN = 1e-3

_MAX_REFINEMENTS = 24


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


class RejectReason(str, Enum):
    NONE = "none"
    NOT_MONIC = "not_monic"
    NOT_SELF_RECIPROCAL = "not_self_reciprocal"
    ROOT_LAYOUT = "root_layout"
    MULTIPLICITY = "multiplicity"
    CYCLOTOMIC_FACTOR = "cyclotomic_factor"


@dataclass(frozen=True)
class ClassVerdict:
    in_class: bool
    irreducible: bool
    reject_reason: RejectReason = RejectReason.NONE
    cyclotomic_index: Optional[int] = None

    def __post_init__(self) -> None:
        if self.irreducible and not self.in_class:
            raise InputError("An irreducible verdict must be in the class")


@dataclass(frozen=True)
class SalemRecord:
    """
    One Salem number.

    ``coeffs`` are a_1..a_{m+1} of P(t) = t^{2m+2} + a_1 t^{2m+1} + ... + 1 and
    ``trace_coeffs`` are b_1..b_{m+1} of Q; angles are ascending in [0, pi].
    """

    m: int
    coeffs: Tuple[int, ...]
    trace_coeffs: Tuple[int, ...]
    alpha_lo: float
    alpha_hi: float
    angles: Tuple[float, ...]

    @property
    def alpha(self) -> float:
        return 0.5 * (self.alpha_lo + self.alpha_hi)

    def poly(self) -> IntPoly:
        half = [1, *self.coeffs]
        return IntPoly(half + half[-2::-1])

    def trace_poly(self) -> IntPoly:
        return trace_poly_from(self.trace_coeffs)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["coeffs"] = list(self.coeffs)
        data["trace_coeffs"] = list(self.trace_coeffs)
        data["angles"] = list(self.angles)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SalemRecord":
        return cls(
            m=int(data["m"]),
            coeffs=tuple(int(c) for c in data["coeffs"]),
            trace_coeffs=tuple(int(c) for c in data["trace_coeffs"]),
            alpha_lo=float(data["alpha_lo"]),
            alpha_hi=float(data["alpha_hi"]),
            angles=tuple(float(a) for a in data["angles"]),
        )


@dataclass(frozen=True)
class CensusSummary:
    m: int
    H: Fraction
    class_count: int
    irreducible_count: int
    reducible_count: int
    records: Tuple[SalemRecord, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.class_count != self.irreducible_count + self.reducible_count:
            raise InputError(
                "Census counts are inconsistent",
                additional_context={
                    "class": self.class_count,
                    "irreducible": self.irreducible_count,
                    "reducible": self.reducible_count,
                },
            )
        if self.irreducible_count != len(self.records):
            raise InputError(
                "Irreducible count does not match the record list",
                additional_context={"irreducible": self.irreducible_count, "records": len(self.records)},
            )

    def angles(self) -> List[float]:
        """All conjugate angles of the census, pooled."""
        return [a for r in self.records for a in r.angles]


@dataclass(frozen=True)
class AngleInterval:
    """Angle interval inside [0, pi]; endpoints are doubles so pi multiples fit."""

    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self) -> None:
        if not (0.0 <= self.lo <= self.hi <= math.pi):
            raise InputError(
                "Angle interval must satisfy 0 <= lo <= hi <= pi",
                additional_context={"lo": self.lo, "hi": self.hi},
            )

    def contains(self, theta: float) -> bool:
        above = theta > self.lo if self.lo_open else theta >= self.lo
        below = theta < self.hi if self.hi_open else theta <= self.hi
        return above and below

    def count(self, angles: Iterable[float]) -> int:
        return sum(1 for a in angles if self.contains(a))

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo!r}, {self.hi!r}{right}"


@dataclass(frozen=True)
class IntervalSpec:
    intervals: Tuple[AngleInterval, ...]

    @property
    def k(self) -> int:
        return len(self.intervals)

    @classmethod
    def of(cls, *pairs: Tuple[float, float]) -> "IntervalSpec":
        return cls(tuple(AngleInterval(float(a), float(b)) for a, b in pairs))

    @classmethod
    def full(cls, k: int) -> "IntervalSpec":
        """k copies of [0, pi]; valid for integration, not for tuple counts."""
        return cls(tuple(AngleInterval(0.0, math.pi) for _ in range(k)))

    @classmethod
    def parse(cls, text: str) -> "IntervalSpec":
        """Parse ``"a:b[,a:b...]"`` into closed intervals."""
        pairs = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if chunk.count(":") != 1:
                raise InputError("Interval must look like a:b", additional_context={"interval": chunk})
            lo, hi = chunk.split(":")
            pairs.append(AngleInterval(parse_angle(lo), parse_angle(hi)))
        if not pairs:
            raise InputError("No intervals given", additional_context={"text": text})
        return cls(tuple(pairs))

    def check_disjoint(self) -> None:
        ordered = sorted(self.intervals, key=lambda iv: (iv.lo, iv.hi))
        for prev, cur in zip(ordered, ordered[1:]):
            touching = cur.lo == prev.hi and not (cur.lo_open or prev.hi_open)
            if cur.lo < prev.hi or touching:
                raise OverlappingIntervals(
                    "Angle intervals overlap",
                    additional_context={"first": str(prev), "second": str(cur)},
                )

    def validate(self, m: int) -> None:
        if not 1 <= self.k <= m:
            raise InputError("Need between 1 and m intervals", additional_context={"k": self.k, "m": m})

    def x_boxes(self) -> List[Tuple[float, float]]:
        """Images under x = -cos(theta)."""
        return [(-math.cos(iv.lo), -math.cos(iv.hi)) for iv in self.intervals]

    def __str__(self) -> str:
        return " x ".join(str(iv) for iv in self.intervals)


# ---------------------------------------------------------------------------
# Coefficient map
# ---------------------------------------------------------------------------


def _elementary_symmetric(values: Sequence[Any]) -> List[Any]:
    e: List[Any] = [1] + [0] * len(values)
    for v in values:
        for j in range(len(e) - 1, 0, -1):
            e[j] = e[j] + v * e[j - 1]
    return e


def coefficients_from_traces(zs: Sequence[Any]) -> List[Any]:
    """
    a_1..a_{m+1} of prod_i (t^2 - z_i t + 1) for traces z_0..z_m.

    a_l = sum over j + 2i = l of (-1)^j e_j(z) C(m + 1 - j, i). Works for any
    numeric type (floats, Fractions, numpy arrays).
    """
    n = len(zs)
    e = _elementary_symmetric(list(zs))
    out = []
    for ell in range(1, n + 1):
        acc: Any = 0
        for i in range(ell // 2 + 1):
            j = ell - 2 * i
            if j > n:
                continue
            acc = acc + (-1) ** j * e[j] * math.comb(n - j, i)
        out.append(acc)
    return out


def coefficient_map(y: float, thetas: Sequence[float]) -> List[float]:
    """a-coefficients of the polynomial with real root y and angles thetas."""
    if not y > 1:
        raise DomainError("y must exceed 1", additional_context={"y": y})
    for t in thetas:
        if not 0.0 <= t <= math.pi:
            raise DomainError("Angles must lie in [0, pi]", additional_context={"theta": t})
    zs = [y + 1.0 / y] + [2.0 * math.cos(t) for t in thetas]
    return [float(a) for a in coefficients_from_traces(zs)]


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


def trace_poly_from(trace_coeffs: Sequence[int]) -> IntPoly:
    """Q from its non-leading coefficients b_1..b_{m+1}."""
    return IntPoly(list(trace_coeffs)[::-1] + [1])


def bound_value(H: Rational) -> Fraction:
    """B = H + 1/H, the largest admissible trace of the real root."""
    h = Fraction(H)
    return h + 1 / h


def _classify_trace(q: IntPoly, p: IntPoly, m: int, big: Fraction) -> ClassVerdict:
    circle = RootInterval.closed(-2, 2)
    outside = RootInterval.half_open(2, big)
    if count_roots_with_multiplicity(q, circle) != m or count_roots_with_multiplicity(q, outside) != 1:
        return ClassVerdict(False, False, RejectReason.ROOT_LAYOUT)
    if not is_squarefree(q):
        return ClassVerdict(True, False, RejectReason.MULTIPLICITY)
    if q(2) == 0:
        return ClassVerdict(True, False, RejectReason.CYCLOTOMIC_FACTOR, 1)
    if q(-2) == 0:
        return ClassVerdict(True, False, RejectReason.CYCLOTOMIC_FACTOR, 2)
    for d in cyclotomic_indices(2 * m):
        if d <= 2:
            continue
        if exact_divides(cyclotomic_poly(d), p):
            return ClassVerdict(True, False, RejectReason.CYCLOTOMIC_FACTOR, d)
    return ClassVerdict(True, True)


def classify(poly: IntPoly, m: int, H: Rational) -> ClassVerdict:
    """
    Decide membership of P in the class of degree 2m+2 with bound H.

    Irreducibility is the absence of cyclotomic factors Phi_d with
    phi(d) <= 2m: any other factor would have to contain both real roots.
    """
    if poly.degree != 2 * (m + 1):
        raise DegreeMismatch(
            "Polynomial degree does not match m",
            additional_context={"degree": poly.degree, "expected": 2 * (m + 1)},
        )
    if not poly.is_monic():
        return ClassVerdict(False, False, RejectReason.NOT_MONIC)
    if not poly.is_palindrome():
        return ClassVerdict(False, False, RejectReason.NOT_SELF_RECIPROCAL)
    return _classify_trace(trace_transform(poly), poly, m, bound_value(H))


# ---------------------------------------------------------------------------
# Root extraction
# ---------------------------------------------------------------------------


def _alpha_of(z: float) -> float:
    return 0.5 * (z + math.sqrt(max(z * z - 4.0, 0.0)))


def _float_down(x: Fraction) -> float:
    f = float(x)
    return math.nextafter(f, -math.inf) if Fraction(f) > x else f


def _float_up(x: Fraction) -> float:
    f = float(x)
    return math.nextafter(f, math.inf) if Fraction(f) < x else f


def _fast_enclosures(q: IntPoly, chain: SturmChain, tol: Fraction) -> Optional[List[RootInterval]]:
    """Certify float roots directly; None when any enclosure fails the Sturm check."""
    estimates = np.sort(np.roots(q.to_float_array()[::-1]).real)
    out = []
    for r in estimates:
        centre = Fraction(float(r))
        iv = RootInterval(centre - tol, centre + tol, True, True)
        if out and iv.lo < out[-1].hi:
            return None
        if chain.count(iv) != 1:
            return None
        out.append(iv)
    return out


def _enclosures(q: IntPoly, chain: SturmChain, upper: Fraction, tol: Fraction) -> List[RootInterval]:
    if chain.squarefree.degree == q.degree:
        fast = _fast_enclosures(q, chain, tol)
        if fast is not None:
            return fast
        logger.warning(f"Float root enclosures failed the Sturm check for {q}; isolating exactly")
    return isolate_roots(q, RootInterval.closed(-2, upper), tol)


def salem_value_and_angles(q: IntPoly, tol: float = 1e-12) -> Tuple[Tuple[float, float], List[float]]:
    """
    Certified enclosure of alpha and the conjugate angles.

    Args:
        q: Trace polynomial with m roots in [-2, 2] and one root above 2
        tol: Requested enclosure width

    Returns:
        ((alpha_lo, alpha_hi), ascending angles)
    """
    if not q.is_monic():
        raise InputError("Trace polynomial must be monic with integer coefficients")
    m = q.degree - 1
    chain = SturmChain(q)
    cauchy = Fraction(1 + max(abs(c) for c in q.coeffs[:-1]))
    above = count_roots_with_multiplicity(q, RootInterval.half_open(2, cauchy))
    circle = count_roots_with_multiplicity(q, RootInterval.closed(-2, 2))
    if above != 1 or circle != m:
        raise LayoutViolation(
            "Root layout does not match a Salem trace polynomial",
            additional_context={"roots_above_2": above, "roots_in_circle": circle, "m": m},
        )

    tol_z = Fraction(tol) / 4
    for _ in range(_MAX_REFINEMENTS):
        found = _enclosures(q, chain, cauchy, tol_z)
        top = found[-1]
        alpha_lo = math.nextafter(_alpha_of(_float_down(max(top.lo, Fraction(2)))), -math.inf)
        alpha_hi = math.nextafter(_alpha_of(_float_up(top.hi)), math.inf)
        width_goal = max(tol, 8 * math.ulp(alpha_hi))
        if alpha_hi - alpha_lo <= width_goal:
            break
        tol_z /= 4
    else:
        raise ToleranceNotMet("Could not reach the requested alpha enclosure", additional_context={"tol": tol})

    angles = sorted(
        math.acos(min(1.0, max(-1.0, float(iv.midpoint) / 2.0))) for iv in found[:-1]
    )
    return (max(alpha_lo, math.nextafter(1.0, math.inf)), alpha_hi), angles


def make_record(q: IntPoly, m: int, tol: float) -> SalemRecord:
    (lo, hi), angles = salem_value_and_angles(q, tol)
    p = inverse_trace_transform(q)
    return SalemRecord(
        m=m,
        coeffs=tuple(p.coeffs[::-1][1:m + 2]),
        trace_coeffs=tuple(q.coeffs[::-1][1:]),
        alpha_lo=lo,
        alpha_hi=hi,
        angles=tuple(angles),
    )


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def coefficient_bounds(m: int, H: Rational) -> List[int]:
    """|b_j| <= C(m, j) 2^j + B C(m, j-1) 2^(j-1) for j = 1..m+1."""
    big = bound_value(H)
    out = []
    for j in range(1, m + 2):
        bound = math.comb(m, j) * 2**j + big * math.comb(m, j - 1) * 2 ** (j - 1)
        out.append(math.floor(bound))
    return out


def _constant_range(head: Sequence[int], m: int, big: Fraction, limit: int) -> range:
    """Admissible b_{m+1} given b_1..b_m, from the signs of Q at -2, 2 and B."""
    rest = IntPoly([0] + list(head)[::-1] + [1])
    lo, hi = -limit, limit
    hi = min(hi, -rest(2))
    lo = max(lo, math.ceil(-rest(big)))
    at_minus_two = -rest(-2)
    if (m + 1) % 2 == 0:
        lo = max(lo, at_minus_two)
    else:
        hi = min(hi, at_minus_two)
    return range(lo, hi + 1)


def _prefilter(candidates: np.ndarray, big: float) -> np.ndarray:
    """Mask of candidates whose float roots do not clearly violate the layout."""
    n = candidates.shape[1]
    companion = np.zeros((candidates.shape[0], n, n))
    companion[:, 0, :] = -candidates.astype(float)
    if n > 1:
        companion[:, np.arange(1, n), np.arange(n - 1)] = 1.0
    roots = np.linalg.eigvals(companion)
    scale = 1.0 + np.abs(roots)
    real_ok = np.all(np.abs(roots.imag) <= PREFILTER_MARGIN * scale, axis=1)
    re = np.sort(roots.real, axis=1)
    in_range = (re[:, 0] >= -2 - PREFILTER_MARGIN) & (re[:, -1] <= big + PREFILTER_MARGIN)
    layout = re[:, -1] >= 2 - PREFILTER_MARGIN
    if n > 1:
        layout &= re[:, -2] <= 2 + PREFILTER_MARGIN
    return real_ok & in_range & layout


def _enumerate_slice(m: int, H: Fraction, b1_values: Sequence[int], tol: float) -> Tuple[int, int, List[SalemRecord]]:
    """Class size, reducible count and records for a range of b_1."""
    big = bound_value(H)
    bounds = coefficient_bounds(m, H)
    class_count = reducible = 0
    records: List[SalemRecord] = []
    middle = [range(-b, b + 1) for b in bounds[1:m]]
    for b1 in b1_values:
        rows: List[Tuple[int, ...]] = []
        for mid in product(*middle):
            head = (b1, *mid)
            for last in _constant_range(head, m, big, bounds[m]):
                rows.append((*head, last))
        if not rows:
            continue
        cand = np.array(rows, dtype=np.int64)
        keep = _prefilter(cand, float(big))
        logger.debug(f"m={m} H={H} b1={b1}: {len(rows)} candidates, {int(keep.sum())} after prefilter")
        for row in cand[keep]:
            trace = tuple(int(v) for v in row)
            q = trace_poly_from(trace)
            p = inverse_trace_transform(q)
            verdict = _classify_trace(q, p, m, big)
            if not verdict.in_class:
                continue
            class_count += 1
            if verdict.irreducible:
                records.append(make_record(q, m, tol))
            else:
                reducible += 1
    return class_count, reducible, records


def _slices(values: Sequence[int], parts: int) -> List[List[int]]:
    parts = max(1, min(parts, len(values)))
    return [list(values[i::parts]) for i in range(parts)]


def enumerate_census(m: int, H: Rational, cfg: Optional[CensusConfig] = None) -> CensusSummary:
    """
    Exact census of the class of degree 2m+2 with height bound H.

    Args:
        m: Number of conjugate pairs on the unit circle
        H: Bound on the Salem number (rational, > 1)
        cfg: Worker count and root-isolation tolerance

    Returns:
        Summary with one record per irreducible member, sorted by trace_coeffs
    """
    cfg = cfg or CensusConfig()
    h = Fraction(H)
    if m < 1:
        raise InputError("m must be at least 1", additional_context={"m": m})
    if h <= 1:
        raise BoundTooSmall("Bound must exceed 1", additional_context={"H": str(h)})

    bounds = coefficient_bounds(m, h)
    b1_values = list(range(-bounds[0], bounds[0] + 1))
    workers = cfg.worker_count()
    logger.info(f"Enumerating m={m} H={h} with {workers} worker(s); |b_j| bounds {bounds}")

    results: List[Tuple[int, int, List[SalemRecord]]] = []
    if workers == 1:
        results.append(_enumerate_slice(m, h, b1_values, cfg.tolerance))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_enumerate_slice, m, h, chunk, cfg.tolerance)
                for chunk in _slices(b1_values, workers * 4)
            ]
            for fut in as_completed(futures):
                results.append(fut.result())

    class_count = sum(r[0] for r in results)
    reducible = sum(r[1] for r in results)
    unique = {rec.trace_coeffs: rec for r in results for rec in r[2]}
    records = tuple(unique[key] for key in sorted(unique))
    summary = CensusSummary(
        m=m,
        H=h,
        class_count=class_count,
        irreducible_count=len(records),
        reducible_count=reducible,
        records=records,
    )
    logger.info(
        f"Census m={m} H={h}: class={class_count} irreducible={len(records)} reducible={reducible}"
    )
    return summary


# ---------------------------------------------------------------------------
# Tuple counts
# ---------------------------------------------------------------------------


def empirical_tuple_count(records: Iterable[SalemRecord], iv: IntervalSpec) -> int:
    """Sum over records of the product of per-interval angle counts."""
    iv.check_disjoint()
    total = 0
    for rec in records:
        prod_count = 1
        for interval in iv.intervals:
            prod_count *= interval.count(rec.angles)
            if not prod_count:
                break
        total += prod_count
    return total
