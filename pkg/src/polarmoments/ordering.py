"""Polar code construction by B-moment ordering, and path-order comparisons.

Over BSC(eps) every path starts from ``B = 1 - eps^2``; the B-moment of each
path follows from its parent by one squaring step, so the whole table costs
``2^(m+1) - 2`` step evaluations and the construction is dominated by the
final sort.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .channel import moments_along_path, offset_from
from .codebook import CodeSpec, Path
from .polarization import b_level

__all__ = [
    "OrderedDesign",
    "construct_code",
    "b_table",
    "sbu_compare",
    "cmu_compare",
    "example3_compare",
    "Crossing",
    "OrderScanReport",
    "order_scan",
    "eps_grid",
]

MAX_SCAN_PAIRS = 2_000_000


def _b0(eps: float) -> float:
    eps = offset_from(eps)
    return 1.0 - eps * eps


def eps_grid(points: int = 99) -> np.ndarray:
    """Uniform interior grid ``{1/(points+1), ..., points/(points+1)}``."""
    return np.arange(1, points + 1) / (points + 1)


def b_table(m: int, b0: float, counter: Counter | None = None) -> np.ndarray:
    """``B`` for all ``2^m`` paths, position = path index."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return b_level(b0, m, counter)


@dataclass
class OrderedDesign:
    m: int
    epsilon: float
    b0: float
    B: np.ndarray
    selected: np.ndarray
    moment_steps: int = 0

    @property
    def k(self) -> int:
        return int(self.selected.sum())

    @property
    def sum_selected_B(self) -> float:
        """Union bound on the block error rate of the selected code."""
        return float(self.B[self.selected].sum())

    def rows(self):
        for i in range(self.B.size):
            yield Path.from_index(i, self.m), float(self.B[i]), bool(self.selected[i])


def construct_code(m: int, k: int, eps: float) -> tuple[CodeSpec, OrderedDesign]:
    """Pick the ``k`` paths with the smallest B-moment over BSC(eps).

    Ties go to the lexicographically smaller path, which is what a stable sort
    over index order gives.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 1 <= k <= (1 << m):
        raise ValueError(f"need 1 <= k <= 2^m, got k={k}")
    eps = offset_from(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"construction needs eps in (0, 1), got {eps}")
    counter: Counter = Counter()
    b0 = 1.0 - eps * eps
    B = b_table(m, b0, counter)
    order = np.argsort(B, kind="stable")
    chosen = np.sort(order[:k])
    selected = np.zeros(B.size, dtype=bool)
    selected[chosen] = True
    spec = CodeSpec(m, chosen)
    design = OrderedDesign(
        m=m, epsilon=eps, b0=b0, B=B, selected=selected, moment_steps=counter["moment_step"]
    )
    return spec, design


def sbu_compare(eps: float) -> tuple[float, float, float]:
    """``(B_01, B_10, B_10 - B_01)``; the gap equals ``2 x^2 (1-x)^2``."""
    x = _b0(eps)
    b01 = 1.0 - (1.0 - x * x) ** 2
    b10 = (1.0 - (1.0 - x) ** 2) ** 2
    return b01, b10, b10 - b01


def cmu_compare(eps: float) -> tuple[float, float]:
    """``(B_0110, B_1001)``."""
    b0 = _b0(eps)
    return moments_along_path(b0, "0110")[-1], moments_along_path(b0, "1001")[-1]


def example3_compare(eps: float) -> tuple[float, float]:
    """``(B_100101, B_011010)``.  Which one is smaller depends on eps."""
    b0 = _b0(eps)
    return moments_along_path(b0, "100101")[-1], moments_along_path(b0, "011010")[-1]


@dataclass(frozen=True)
class Crossing:
    lo: float
    hi: float


@dataclass
class OrderScanReport:
    m: int
    w: int
    grid: np.ndarray
    pairs: list[tuple[Path, Path]]
    crossings: dict[tuple[Path, Path], list[Crossing]] = field(default_factory=dict)

    def permanent(self, pair: tuple[Path, Path]) -> bool:
        return not self.crossings.get(pair)

    @property
    def crossing_pairs(self) -> list[tuple[Path, Path]]:
        return [p for p in self.pairs if self.crossings.get(p)]


def _bisect(xi: Path, eta: Path, lo: float, hi: float, tol: float) -> Crossing:
    def diff(e: float) -> float:
        b0 = 1.0 - e * e
        return moments_along_path(b0, xi)[-1] - moments_along_path(b0, eta)[-1]

    s_lo = np.sign(diff(lo))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        s_mid = np.sign(diff(mid))
        if s_mid == 0:
            return Crossing(mid, mid)
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    return Crossing(lo, hi)


def order_scan(
    m: int, w: int, grid: np.ndarray | None = None, tol: float = 1e-9
) -> OrderScanReport:
    """Check whether every pair of weight-``w`` paths keeps its B order on the grid.

    Grid points where two B values are exactly equal (typically by underflow or
    rounding near eps = 0 or 1) carry no sign and are skipped.
    """
    if m < 1 or not 0 <= w <= m:
        raise ValueError(f"need m >= 1 and 0 <= w <= m, got m={m}, w={w}")
    grid = eps_grid() if grid is None else np.asarray(grid, dtype=float)
    if np.any((grid <= 0) | (grid >= 1)):
        raise ValueError("grid offsets must lie in (0, 1)")
    idx = [i for i in range(1 << m) if i.bit_count() == w]
    n_pairs = len(idx) * (len(idx) - 1) // 2
    if n_pairs > MAX_SCAN_PAIRS:
        raise ValueError(f"{n_pairs} pairs exceed the scan budget of {MAX_SCAN_PAIRS}")
    paths = [Path.from_index(i, m) for i in idx]
    # rows: grid points; columns: weight-w paths
    table = np.stack([b_table(m, 1.0 - e * e)[idx] for e in grid])
    report = OrderScanReport(m=m, w=w, grid=grid, pairs=[])
    for a, b in combinations(range(len(idx)), 2):
        pair = (paths[a], paths[b])
        report.pairs.append(pair)
        sign = np.sign(table[:, a] - table[:, b])
        nz = np.flatnonzero(sign)
        found = []
        for i, j in zip(nz[:-1], nz[1:]):
            if sign[i] != sign[j]:
                found.append(_bisect(pair[0], pair[1], float(grid[i]), float(grid[j]), tol))
        if found:
            report.crossings[pair] = found
    return report
