"""Binary symmetric channels, compound-BSC ensembles and their moments.

A symmetric channel is handled as a finite mixture of BSCs ``(beta_t, eps_t)``
where ``eps_t = 1 - 2 p_t`` is the offset of component ``t``.  Appending a path
bit 1 (the v-extension) degrades the channel by multiplying offsets; appending
a bit 0 (the u-extension) upgrades it by multiplying the per-component
Bhattacharyya values ``z_t = sqrt(1 - eps_t^2)``.

Soft values are carried as log-likelihoods ``L = ln h`` with ``h`` the ratio of
posterior probabilities of symbol +1 (bit 0) and symbol -1 (bit 1).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from .codebook import Path, PathLike, as_path

log = logging.getLogger(__name__)

MERGE_TOL = 1e-12
MAX_COMPONENTS = 10**6
MAX_TREE_DEPTH = 8

__all__ = [
    "MERGE_TOL",
    "MAX_COMPONENTS",
    "MAX_TREE_DEPTH",
    "Bsc",
    "CompoundBsc",
    "ChannelMoments",
    "SoftObservation",
    "BoundReport",
    "bsc_soft",
    "bsc_observe",
    "degrade",
    "upgrade",
    "transform",
    "ensemble_along_path",
    "walk_transform_tree",
    "moments",
    "moment_step",
    "moments_along_path",
    "bhattacharyya_bounds",
    "offset_from",
]


def _check_offset(eps: float) -> float:
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"offset must lie in [0, 1], got {eps}")
    return eps


def offset_from(epsilon: float | None = None, crossover: float | None = None) -> float:
    """Resolve the offset from exactly one of ``epsilon`` or crossover ``p``."""
    if (epsilon is None) == (crossover is None):
        raise ValueError("give exactly one of epsilon or crossover")
    if crossover is not None:
        if not 0.0 <= crossover <= 0.5:
            raise ValueError(f"crossover must lie in [0, 1/2], got {crossover}")
        return 1.0 - 2.0 * crossover
    return _check_offset(epsilon)


@dataclass(frozen=True)
class Bsc:
    epsilon: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilon", _check_offset(self.epsilon))

    @classmethod
    def from_crossover(cls, p: float) -> "Bsc":
        return cls(offset_from(crossover=p))

    @property
    def crossover(self) -> float:
        return (1.0 - self.epsilon) / 2.0


@dataclass(frozen=True)
class CompoundBsc:
    """Canonical BSC ensemble: offsets ascending, near-equal offsets merged.

    Construct through :meth:`from_components` (or :meth:`bsc`) so that the
    canonical form is enforced.
    """

    weights: np.ndarray
    offsets: np.ndarray

    @classmethod
    def from_components(
        cls,
        components: Sequence[tuple[float, float]] | None = None,
        *,
        weights: np.ndarray | None = None,
        offsets: np.ndarray | None = None,
        tol: float = MERGE_TOL,
    ) -> "CompoundBsc":
        if components is not None:
            arr = np.asarray(components, dtype=float).reshape(-1, 2)
            weights, offsets = arr[:, 0], arr[:, 1]
        w = np.asarray(weights, dtype=float).ravel()
        e = np.asarray(offsets, dtype=float).ravel()
        if w.size == 0 or w.shape != e.shape:
            raise ValueError("need matching, non-empty weight and offset lists")
        if np.any(w <= 0):
            raise ValueError("component weights must be positive")
        if np.any((e < 0) | (e > 1)) or np.any(np.isnan(e)):
            raise ValueError("component offsets must lie in [0, 1]")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        order = np.argsort(e, kind="stable")
        w, e = w[order], e[order]
        # a new group starts wherever the offset moves past the group's head by > tol
        starts = [0]
        head = e[0]
        for i in range(1, e.size):
            if e[i] - head > tol:
                starts.append(i)
                head = e[i]
        starts_arr = np.asarray(starts)
        merged_w = np.add.reduceat(w, starts_arr)
        merged_e = e[starts_arr]
        merged_w.flags.writeable = False
        merged_e.flags.writeable = False
        return cls(merged_w, merged_e)

    @classmethod
    def bsc(cls, eps: float) -> "CompoundBsc":
        return cls.from_components([(1.0, _check_offset(eps))])

    @property
    def size(self) -> int:
        return int(self.weights.size)

    @property
    def z(self) -> np.ndarray:
        return np.sqrt(np.clip(1.0 - self.offsets**2, 0.0, 1.0))

    def components(self) -> list[tuple[float, float]]:
        return list(zip(self.weights.tolist(), self.offsets.tolist()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompoundBsc):
            return NotImplemented
        return np.array_equal(self.weights, other.weights) and np.array_equal(
            self.offsets, other.offsets
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class ChannelMoments:
    D: float
    A: float
    B: float
    Z: float
    V: float


@dataclass(frozen=True)
class BoundReport:
    Z: float
    B: float
    sqrt_B: float
    one_minus_D: float
    sqrt_one_minus_D2: float
    second_moment_ok: bool
    first_moment_ok: bool

    @property
    def ok(self) -> bool:
        return self.second_moment_ok and self.first_moment_ok


@dataclass(frozen=True)
class SoftObservation:
    """Per-position log-likelihoods with the q, g and h views."""

    llr: np.ndarray

    def __post_init__(self) -> None:
        llr = np.asarray(self.llr, dtype=float)
        if np.any(np.isnan(llr)):
            raise ValueError("log-likelihoods must not be NaN")
        object.__setattr__(self, "llr", llr)

    @property
    def q(self) -> np.ndarray:
        return 0.5 * (1.0 + np.tanh(self.llr / 2.0))

    @property
    def g(self) -> np.ndarray:
        return np.tanh(self.llr / 2.0)

    @property
    def h(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.llr)

    def __len__(self) -> int:
        return int(self.llr.shape[-1])


def bsc_soft(y: Union[int, np.ndarray], eps: float) -> SoftObservation:
    """Soft values of BSC outputs: ``g = eps*y`` and ``h = (1+eps*y)/(1-eps*y)``."""
    eps = _check_offset(eps)
    y = np.asarray(y)
    if np.any((y != 1) & (y != -1)):
        raise ValueError("channel symbols must be +1 or -1")
    if eps == 1.0:
        llr = np.where(y > 0, np.inf, -np.inf)
    else:
        llr = y * np.log1p(eps) - y * np.log1p(-eps)
    return SoftObservation(np.asarray(llr, dtype=float))


def bsc_observe(codeword: np.ndarray, eps: float, rng: np.random.Generator | int) -> np.ndarray:
    """Send a binary codeword through BSC(eps); returns received +/-1 symbols."""
    eps = _check_offset(eps)
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    x = 1 - 2 * np.asarray(codeword, dtype=np.int8)
    flips = rng.random(x.shape) < (1.0 - eps) / 2.0
    return np.where(flips, -x, x).astype(np.int8)


def _pair_up(W: CompoundBsc) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if W.size**2 > MAX_COMPONENTS:
        raise ValueError(f"transform would create {W.size**2} components (cap {MAX_COMPONENTS})")
    beta = np.outer(W.weights, W.weights).ravel()
    e = W.offsets
    z2 = 1.0 - e**2
    return beta, np.outer(e, e).ravel(), np.outer(z2, z2).ravel()


def degrade(W: CompoundBsc) -> CompoundBsc:
    """v-extension: components ``(beta_t beta_s, eps_t eps_s)``."""
    beta, ee, _ = _pair_up(W)
    return CompoundBsc.from_components(weights=beta, offsets=ee)


def upgrade(W: CompoundBsc) -> CompoundBsc:
    """u-extension: components ``(beta_t beta_s)`` with Bhattacharyya ``z_t z_s``."""
    beta, _, zz2 = _pair_up(W)
    eps = np.sqrt(np.clip(1.0 - zz2, 0.0, 1.0))
    return CompoundBsc.from_components(weights=beta, offsets=eps)


def transform(W: CompoundBsc, bit: int) -> CompoundBsc:
    if bit == 1:
        return degrade(W)
    if bit == 0:
        return upgrade(W)
    raise ValueError(f"path bit must be 0 or 1, got {bit!r}")


def ensemble_along_path(W: CompoundBsc, xi: PathLike | Sequence[int]) -> CompoundBsc:
    bits = as_path(xi).bits if isinstance(xi, (Path, str)) else tuple(xi)
    for b in bits:
        W = transform(W, b)
    return W


def walk_transform_tree(
    W: CompoundBsc, depth: int, max_depth: int = MAX_TREE_DEPTH
) -> Iterator[tuple[tuple[int, ...], CompoundBsc]]:
    """Yield ``(prefix, ensemble)`` for every prefix of length 1..depth.

    Prefixes share their parent's ensemble, so each node is transformed once.
    """
    if depth > max_depth:
        raise ValueError(f"transform-tree depth {depth} exceeds cap {max_depth}")
    stack: list[tuple[tuple[int, ...], CompoundBsc]] = [((), W)]
    while stack:
        prefix, node = stack.pop()
        if len(prefix) == depth:
            continue
        for bit in (1, 0):
            child = transform(node, bit)
            yield prefix + (bit,), child
            stack.append((prefix + (bit,), child))


def moments(W: CompoundBsc) -> ChannelMoments:
    beta, e, z = W.weights, W.offsets, W.z
    D = float(beta @ e)
    A = float(beta @ e**2)
    B = float(beta @ (1.0 - e**2))
    Z = float(beta @ z)
    return ChannelMoments(D=D, A=A, B=B, Z=Z, V=float(np.sqrt(max(A * B, 0.0))))


def moment_step(b: float, bit: int) -> float:
    """One step of the B recursion: bit 0 squares B, bit 1 squares A = 1 - B."""
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"B-moment must lie in [0, 1], got {b}")
    if bit == 0:
        return b * b
    if bit == 1:
        # 1 - (1 - b)^2 without cancellation for small b
        return b * (2.0 - b)
    raise ValueError(f"path bit must be 0 or 1, got {bit!r}")


def moments_along_path(b0: float, xi: PathLike | Sequence[int]) -> list[float]:
    """B-moments ``[B_0, B_(a_1), B_(a_1 a_2), ...]``, applying ``a_1`` first."""
    if not 0.0 <= b0 <= 1.0:
        raise ValueError(f"B-moment must lie in [0, 1], got {b0}")
    if isinstance(xi, (Path, str)) and str(xi) != "":
        bits = as_path(xi).bits
    else:
        bits = tuple(xi)
    out = [float(b0)]
    for bit in bits:
        out.append(moment_step(out[-1], bit))
    return out


def bhattacharyya_bounds(M: ChannelMoments, slack: float = 1e-12) -> BoundReport:
    """Check ``B <= Z <= sqrt(B)`` and ``1 - D <= Z <= sqrt(1 - D^2)``."""
    sqrt_b = float(np.sqrt(M.B))
    one_minus_d = 1.0 - M.D
    upper_d = float(np.sqrt(max(1.0 - M.D**2, 0.0)))
    return BoundReport(
        Z=M.Z,
        B=M.B,
        sqrt_B=sqrt_b,
        one_minus_D=one_minus_d,
        sqrt_one_minus_D2=upper_d,
        second_moment_ok=M.B - slack <= M.Z <= sqrt_b + slack,
        first_moment_ok=one_minus_d - slack <= M.Z <= upper_d + slack,
    )
