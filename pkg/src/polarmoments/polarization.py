"""Potential ``V = sqrt(A B)``, its one-step ratio and exhaustive path statistics.

Enumerations run level by level over numpy arrays, children interleaved so
that array position equals path index (``a_1`` most significant).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .channel import moment_step

__all__ = [
    "SQRT3_2",
    "UNDERFLOW_LOG2",
    "r_func",
    "ratio_R",
    "b_level",
    "log_ab_level",
    "PolarStats",
    "expected_v",
    "v_lambda",
    "ratio_lambda",
    "ratio_scan_lambda",
    "AngleState",
    "angle_step",
    "angle_step_literal",
    "FastPolarizationParams",
    "fast_polarization_params",
    "ABHistogram",
    "ab_histogram",
    "log2_histogram",
    "default_grid",
]

SQRT3_2 = math.sqrt(3.0) / 2.0
UNDERFLOW_LOG2 = -1000.0
MAX_LEVELS = 24


def default_grid(points: int = 999) -> np.ndarray:
    """``{1/(points+1), ..., points/(points+1)}``, i.e. 0.001..0.999 by default."""
    return np.arange(1, points + 1) / (points + 1)


def r_func(x):
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)):
        raise ValueError("r(x) is defined on [0, 1]")
    out = np.sqrt(x * (1.0 - x))
    return out if out.ndim else float(out)


def ratio_R(x):
    """Expected one-step change of V relative to V at ``B = x``."""
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0) | (x >= 1)):
        raise ValueError("R(x) needs x strictly inside (0, 1)")
    out = (r_func(x**2) + r_func((1.0 - x) ** 2)) / (2.0 * r_func(x))
    return out if np.ndim(out) else float(out)


def _check_levels(levels: int) -> None:
    if not 1 <= levels <= MAX_LEVELS:
        raise ValueError(f"levels must be in 1..{MAX_LEVELS}, got {levels}")


def b_level(b0: float, levels: int, counter: Counter | None = None) -> np.ndarray:
    """B-moments of all ``2^levels`` paths, indexed by path index.

    Each level applies the same maps as :func:`moment_step` to a whole array;
    ``counter["moment_step"]`` (if given) receives the number of evaluations.
    """
    if not 0.0 <= b0 <= 1.0:
        raise ValueError(f"B-moment must lie in [0, 1], got {b0}")
    b = np.array([float(b0)])
    for _ in range(levels):
        nxt = np.empty(2 * b.size)
        nxt[0::2] = b * b
        nxt[1::2] = b * (2.0 - b)
        if counter is not None:
            counter["moment_step"] += nxt.size
        b = nxt
    return b


def log_ab_level(b0: float, levels: int) -> np.ndarray:
    """Natural log of ``A*B`` for every path, tracked without underflow.

    Keeps ``(ln A, ln B)``.  A 0 bit squares B and turns A into
    ``1 - B^2 = A (1 + B)``; a 1 bit is the mirror image, so no step ever
    subtracts nearly equal numbers.
    """
    if not 0.0 <= b0 <= 1.0:
        raise ValueError(f"B-moment must lie in [0, 1], got {b0}")
    with np.errstate(divide="ignore"):
        la = np.array([math.log(1.0 - b0) if b0 < 1.0 else -np.inf])
        lb = np.array([math.log(b0) if b0 > 0.0 else -np.inf])
        for _ in range(levels):
            na, nb = np.empty(2 * la.size), np.empty(2 * la.size)
            nb[0::2] = 2.0 * lb
            na[0::2] = la + np.log1p(np.exp(lb))
            na[1::2] = 2.0 * la
            nb[1::2] = lb + np.log1p(np.exp(la))
            la, lb = na, nb
    return la + lb


@dataclass(frozen=True)
class PolarStats:
    level: int
    b0: float
    mean_V: float
    bound: float
    threshold: float
    fraction_ge_threshold: float
    histogram: list[tuple[float, float, int]]

    @property
    def holds(self) -> bool:
        return self.mean_V <= self.bound + 1e-12


def log2_histogram(values: np.ndarray, width: float = 1.0) -> list[tuple[float, float, int]]:
    """Bucket ``log2(A B)`` values; everything below -1000 lands in one bucket."""
    values = np.asarray(values, dtype=float)
    under = values < UNDERFLOW_LOG2
    rows: list[tuple[float, float, int]] = []
    if under.any():
        rows.append((-math.inf, UNDERFLOW_LOG2, int(under.sum())))
    rest = values[~under]
    if rest.size:
        lo = math.floor(rest.min() / width) * width
        hi = math.floor(rest.max() / width) * width + width
        edges = np.arange(lo, hi + width / 2, width)
        counts, _ = np.histogram(rest, bins=edges)
        rows += [(float(a), float(b), int(c)) for a, b, c in zip(edges[:-1], edges[1:], counts) if c]
    return rows


def expected_v(levels: int, b0: float) -> PolarStats:
    """Exact mean of V over all ``2^levels`` equiprobable paths."""
    _check_levels(levels)
    log_ab = log_ab_level(b0, levels)
    v = np.exp(0.5 * log_ab)
    threshold = SQRT3_2 ** (levels / 2)
    log2ab = log_ab / math.log(2.0)
    return PolarStats(
        level=levels,
        b0=float(b0),
        mean_V=float(v.mean()),
        bound=SQRT3_2**levels,
        threshold=threshold,
        fraction_ge_threshold=float(np.count_nonzero(v >= threshold) / v.size),
        histogram=log2_histogram(log2ab),
    )


def v_lambda(a: float, b: float, lam: float) -> float:
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if not (0 <= a <= 1 and 0 <= b <= 1 and abs(a + b - 1) <= 1e-12):
        raise ValueError("need a, b in [0, 1] with a + b = 1")
    return float((a * b) ** lam)


def ratio_lambda(x, lam: float):
    """One-step ratio ``E V(lambda)_child / V(lambda)`` at ``B = x``."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0) | (x >= 1)):
        raise ValueError("ratio needs x strictly inside (0, 1)")
    b0, b1 = x**2, 1.0 - (1.0 - x) ** 2
    num = (b0 * (1 - b0)) ** lam + (b1 * (1 - b1)) ** lam
    out = num / (2.0 * (x * (1.0 - x)) ** lam)
    return out if out.ndim else float(out)


def ratio_scan_lambda(lam: float, grid: np.ndarray | None = None) -> float:
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    return float(np.max(ratio_lambda(grid, lam)))


@dataclass(frozen=True)
class AngleState:
    """Angle with ``A = cos^2(theta)`` and ``B = sin^2(theta)``."""

    theta: float

    def __post_init__(self) -> None:
        if not -1e-15 <= self.theta <= math.pi / 2 + 1e-15:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")

    @property
    def A(self) -> float:
        return math.cos(self.theta) ** 2

    @property
    def B(self) -> float:
        return math.sin(self.theta) ** 2


def angle_step(theta: float, bit: int) -> AngleState:
    """Move the angle so that ``sin^2`` follows the B recursion exactly."""
    s2 = min(max(math.sin(theta) ** 2, 0.0), 1.0)
    b_next = moment_step(s2, bit)
    return AngleState(math.asin(math.sqrt(b_next)))


def angle_step_literal(theta: float, bit: int) -> AngleState:
    """Alternative ``arcsin(sin^4)`` / ``arccos(cos^4)`` update; kept for comparison only."""
    if bit == 0:
        return AngleState(math.asin(math.sin(theta) ** 4))
    return AngleState(math.acos(math.cos(theta) ** 4))


@dataclass(frozen=True)
class FastPolarizationParams:
    m: int
    lam: int
    delta: int
    s: int
    rho: int
    ell: int

    @property
    def feasible(self) -> bool:
        # segments must fit after the initial run, and s >= 2 for any decay
        return self.ell + self.lam <= self.m and self.s >= 2


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def fast_polarization_params(m: int) -> FastPolarizationParams:
    """Segment parameters of the fast-polarization argument at length ``m``.

    ``lam`` and ``delta`` are rounded to integers first (half up); ``s``,
    ``rho`` and the initial segment length ``ell = 5 lam ln(lam)`` follow from
    the rounded values.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    lam = _round_half_up(m**0.75)
    delta = _round_half_up(m**0.5)
    return FastPolarizationParams(
        m=m,
        lam=lam,
        delta=delta,
        s=_round_half_up((lam - delta) / 2),
        rho=_round_half_up((lam + delta) / 2),
        ell=_round_half_up(5.0 * lam * math.log(lam)),
    )


@dataclass(frozen=True)
class ABHistogram:
    m: int
    b0: float
    quantiles: dict[float, float]
    fractions_below: dict[float, float]
    underflow: int
    histogram: list[tuple[float, float, int]]

    @property
    def median(self) -> float:
        return self.quantiles[0.5]


def ab_histogram(
    m: int,
    b0: float,
    thresholds: tuple[float, ...] = (),
    quantiles: tuple[float, ...] = (0.1, 0.25, 0.5, 0.75, 0.9),
) -> ABHistogram:
    """Distribution of ``log2(A B)`` over all ``2^m`` paths."""
    _check_levels(m)
    vals = np.sort(log_ab_level(b0, m) / math.log(2.0))
    qs: dict[float, float] = {}
    for q in sorted(set(quantiles) | {0.5}):
        # method="lower" keeps -inf (b0 at 0 or 1) from turning into NaN
        qs[q] = float(np.quantile(vals, q, method="lower" if np.isinf(vals).any() else "linear"))
    return ABHistogram(
        m=m,
        b0=float(b0),
        quantiles=qs,
        fractions_below={t: float(np.count_nonzero(vals < t) / vals.size) for t in thresholds},
        underflow=int(np.count_nonzero(vals < UNDERFLOW_LOG2)),
        histogram=log2_histogram(vals),
    )
