"""Paths, monomial codewords and the codes C(m, T).

A path ``(a_1, ..., a_m)`` names both an information bit and the monomial
``x_1^a_1 ... x_m^a_m``.  Codeword positions are indexed by the evaluation
point ``(x_1, ..., x_m)`` read as a binary number with ``x_1`` most
significant, so the ``x_1 = 0`` half of a codeword is the ``u`` half of the
Plotkin ``(u, u + v)`` layout.

Paths are also indexed by integers with the same convention (``a_1`` is the
most significant bit), which makes lexicographic order on path strings equal
to numeric order on indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

__all__ = [
    "Path",
    "CodeSpec",
    "MessageLike",
    "monomial_codeword",
    "rm_info_set",
    "message_vector",
    "encode_monomial_sum",
    "encode_plotkin",
    "plotkin_transform",
    "channel_symbols",
]


@dataclass(frozen=True, order=True)
class Path:
    """Bit sequence ``(a_1, ..., a_m)``; ``str(path)`` gives ``"a_1...a_m"``."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise ValueError("a path needs at least one bit")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"path bits must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def parse(cls, text: str) -> "Path":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a path string: {text!r}")
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def from_index(cls, index: int, m: int) -> "Path":
        if m < 1 or not 0 <= index < (1 << m):
            raise ValueError(f"index {index} out of range for m={m}")
        return cls(tuple((index >> (m - 1 - i)) & 1 for i in range(m)))

    @property
    def m(self) -> int:
        return len(self.bits)

    @property
    def weight(self) -> int:
        return sum(self.bits)

    @property
    def index(self) -> int:
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


PathLike = Union[Path, str]


def as_path(p: PathLike) -> Path:
    return p if isinstance(p, Path) else Path.parse(p)


@dataclass(frozen=True)
class CodeSpec:
    """Code ``C(m, T)``: depth ``m`` and information set ``T``.

    ``indices`` holds the sorted path indices of ``T``; everything outside it is
    frozen to zero.
    """

    m: int
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        raw = np.asarray(self.indices, dtype=np.int64).ravel()
        idx = np.unique(raw)
        n = 1 << self.m
        if not idx.size:
            raise ValueError("information set is empty")
        if idx.size != raw.size:
            raise ValueError("information set contains duplicate paths")
        if idx[0] < 0 or idx[-1] >= n:
            raise ValueError(f"path index out of range for m={self.m}")
        object.__setattr__(self, "indices", tuple(idx.tolist()))

    @classmethod
    def from_paths(cls, m: int, paths: Iterable[PathLike]) -> "CodeSpec":
        indices = []
        for p in paths:
            p = as_path(p)
            if p.m != m:
                raise ValueError(f"path {p} has length {p.m}, expected {m}")
            indices.append(p.index)
        return cls(m, tuple(indices))

    @classmethod
    def full(cls, m: int) -> "CodeSpec":
        return cls(m, tuple(range(1 << m)))

    @property
    def n(self) -> int:
        return 1 << self.m

    @property
    def k(self) -> int:
        return len(self.indices)

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def paths(self) -> tuple[Path, ...]:
        return tuple(Path.from_index(i, self.m) for i in self.indices)

    @cached_property
    def info_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[list(self.indices)] = True
        mask.flags.writeable = False
        return mask

    def __contains__(self, p: object) -> bool:
        if isinstance(p, (Path, str)):
            p = as_path(p)
            return p.m == self.m and p.index in self._index_set
        return False

    @cached_property
    def _index_set(self) -> frozenset[int]:
        return frozenset(self.indices)


MessageLike = Union[Mapping[PathLike, int], Sequence[int], np.ndarray]


def monomial_codeword(m: int, xi: PathLike) -> np.ndarray:
    """Evaluate ``x^xi`` at every point of F_2^m (position 0 first)."""
    xi = as_path(xi)
    if xi.m != m:
        raise ValueError(f"path {xi} has length {xi.m}, expected m={m}")
    j = np.arange(1 << m)
    mask = xi.index
    return ((j & mask) == mask).astype(np.uint8)


def rm_info_set(r: int, m: int) -> CodeSpec:
    """Information set of RM(r, m): every path of weight at most ``r``."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 0 <= r <= m:
        raise ValueError(f"need 0 <= r <= m, got r={r}, m={m}")
    idx = [i for i in range(1 << m) if i.bit_count() <= r]
    spec = CodeSpec(m, tuple(idx))
    assert spec.k == sum(comb(m, i) for i in range(r + 1))
    return spec


def message_vector(spec: CodeSpec, msg: MessageLike) -> np.ndarray:
    """Spread a message over all ``2^m`` paths, frozen positions set to 0.

    ``msg`` is either a mapping path -> bit whose keys are exactly ``T``, or an
    array whose last axis holds the ``k`` bits in ascending path order (extra
    leading axes are treated as a batch).
    """
    if isinstance(msg, Mapping):
        f = np.zeros(spec.n, dtype=np.uint8)
        seen = set()
        for key, bit in msg.items():
            p = as_path(key)
            if p not in spec:
                raise ValueError(f"path {p} is not in the information set")
            if bit not in (0, 1):
                raise ValueError(f"bit for path {p} must be 0 or 1, got {bit!r}")
            f[p.index] = bit
            seen.add(p.index)
        if len(seen) != spec.k:
            raise ValueError(f"message covers {len(seen)} of {spec.k} information paths")
        return f
    bits = np.asarray(msg)
    if bits.shape[-1:] != (spec.k,):
        raise ValueError(f"message must have {spec.k} bits, got shape {bits.shape}")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("message bits must be 0 or 1")
    f = np.zeros(bits.shape[:-1] + (spec.n,), dtype=np.uint8)
    f[..., list(spec.indices)] = bits
    return f


def encode_monomial_sum(spec: CodeSpec, msg: MessageLike) -> np.ndarray:
    """Binary sum of the monomial codewords selected by ``msg``."""
    f = message_vector(spec, msg)
    if f.ndim != 1:
        raise ValueError("encode_monomial_sum takes a single message")
    c = np.zeros(spec.n, dtype=np.uint8)
    for i in np.flatnonzero(f):
        c ^= monomial_codeword(spec.m, Path.from_index(int(i), spec.m))
    return c


def plotkin_transform(f: np.ndarray) -> np.ndarray:
    """Recursive ``(u, u + v)`` map on the last axis of a 0/1 array.

    The first half of ``f`` (paths with ``a_1 = 0``) encodes ``u``, the second
    half encodes ``v``.
    """
    n = f.shape[-1]
    if n == 1:
        return f.copy()
    h = n // 2
    u = plotkin_transform(f[..., :h])
    v = plotkin_transform(f[..., h:])
    return np.concatenate([u, u ^ v], axis=-1)


def encode_plotkin(spec: CodeSpec, msg: MessageLike) -> np.ndarray:
    """Encode by the m-level Plotkin recursion (accepts batched messages)."""
    return plotkin_transform(message_vector(spec, msg))


def channel_symbols(codeword: np.ndarray) -> np.ndarray:
    """Map bits ``a`` to channel symbols ``(-1)^a``."""
    return (1 - 2 * np.asarray(codeword, dtype=np.int8)).astype(np.int8)
