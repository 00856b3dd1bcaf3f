"""Successive-cancellation decoding of C(m, T).

The decoder walks the path tree depth first, always taking the v-extension
(bit 1, offsets multiply) before the u-extension (bit 0, likelihoods
multiply), and hands each re-encoded subvector back to its parent.  All
arrays carry an optional leading batch axis so many received words can be
decoded in one pass.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping

import numpy as np

from .channel import (
    CompoundBsc,
    SoftObservation,
    bsc_soft,
    ensemble_along_path,
    moments,
    _check_offset,
)
from .codebook import CodeSpec, Path, PathLike, as_path, plotkin_transform

log = logging.getLogger(__name__)

__all__ = [
    "degrade_combine",
    "upgrade_combine",
    "DecodeOutput",
    "sc_decode",
    "decoding_order",
    "exact_leaf_posterior",
    "GenieReport",
    "genie_error_rates",
    "BlockReport",
    "block_error_rate",
    "trial_uniforms",
]

ORACLE_MAX_FREE_BITS = 20


def degrade_combine(L_left, L_right):
    """Log-likelihood whose offset is the product of the two input offsets.

    Large magnitudes use ``min(a, b) + log1p(e^-(a+b)) - log1p(e^-|a-b|)``,
    which stays exact for large and infinite inputs.  When the smaller input
    is below 1 that form cancels (it returns 0 instead of about ``a b / 2``
    for tiny inputs), so the tanh rule is used there instead.
    """
    a = np.asarray(L_left, dtype=float)
    b = np.asarray(L_right, dtype=float)
    sign = np.sign(a) * np.sign(b)
    aa, bb = np.broadcast_arrays(np.abs(a), np.abs(b))
    with np.errstate(invalid="ignore"):
        gap = np.where(np.isinf(aa) & np.isinf(bb), np.inf, np.abs(aa - bb))
    low = np.minimum(aa, bb)
    mag = np.asarray(low + np.log1p(np.exp(-(aa + bb))) - np.log1p(np.exp(-gap)))
    small = low < 1.0
    if np.any(small):
        mag[small] = 2.0 * np.arctanh(np.tanh(aa[small] / 2) * np.tanh(bb[small] / 2))
    out = sign * mag
    # sign 0 (an erased input) times an infinite magnitude
    out = np.where(sign == 0, 0.0, out)
    return out if out.ndim else float(out)


def upgrade_combine(L_left, L_right, v_hat):
    """``L_left + (-1)^v_hat * L_right``; the contradiction inf - inf gives 0."""
    a = np.asarray(L_left, dtype=float)
    b = np.asarray(L_right, dtype=float)
    v = np.asarray(v_hat)
    if np.any((v != 0) & (v != 1)):
        raise ValueError("decided bits must be 0 or 1")
    with np.errstate(invalid="ignore"):
        out = a + np.where(v == 0, b, -b)
    bad = np.isnan(out)
    if np.any(bad):
        log.info("upgrade_combine: %d contradictory +inf/-inf pairs set to 0", int(bad.sum()))
        out = np.where(bad, 0.0, out)
    return out if out.ndim else float(out)


@dataclass
class DecodeOutput:
    """Result of :func:`sc_decode` for a single word or a batch.

    ``leaf_llr[..., i]`` is the leaf log-likelihood of the path with index ``i``
    and ``decisions[..., i]`` the bit chosen there (0 on frozen paths unless a
    genie supplied other values).
    """

    spec: CodeSpec
    bits: np.ndarray
    codeword: np.ndarray
    leaf_llr: np.ndarray
    decisions: np.ndarray
    combine_ops: int = 0

    @property
    def message(self) -> dict[Path, int]:
        if self.bits.ndim != 1:
            raise ValueError("message view is only defined for a single decode")
        return {p: int(b) for p, b in zip(self.spec.paths, self.bits)}

    @property
    def leaf_q(self) -> np.ndarray:
        return SoftObservation(self.leaf_llr).q


class _Walker:
    def __init__(self, spec: CodeSpec, genie: np.ndarray | None):
        self.spec = spec
        self.genie = genie
        self.info = spec.info_mask
        self.ops = 0
        self.leaf_llr: np.ndarray | None = None
        self.decisions: np.ndarray | None = None

    def run(self, llr: np.ndarray) -> np.ndarray:
        batch = llr.shape[:-1]
        self.leaf_llr = np.empty(batch + (self.spec.n,), dtype=float)
        self.decisions = np.zeros(batch + (self.spec.n,), dtype=np.uint8)
        return self._node(llr, 0, 0)

    def _node(self, llr: np.ndarray, prefix: int, depth: int) -> np.ndarray:
        if depth == self.spec.m:
            L = llr[..., 0]
            self.leaf_llr[..., prefix] = L
            if self.genie is not None:
                bit = self.genie[..., prefix].astype(np.uint8)
            elif self.info[prefix]:
                bit = (L < 0).astype(np.uint8)
            else:
                bit = np.zeros(L.shape, dtype=np.uint8)
            self.decisions[..., prefix] = bit
            return bit[..., None]
        mu = llr.shape[-1] // 2
        left, right = llr[..., :mu], llr[..., mu:]
        v_hat = self._node(degrade_combine(left, right), 2 * prefix + 1, depth + 1)
        u_hat = self._node(upgrade_combine(left, right, v_hat), 2 * prefix, depth + 1)
        self.ops += 2 * mu
        return np.concatenate([u_hat, u_hat ^ v_hat], axis=-1)


def sc_decode(
    spec: CodeSpec,
    soft: SoftObservation | np.ndarray,
    genie: np.ndarray | None = None,
) -> DecodeOutput:
    """Run SC decoding on one received word (shape ``(n,)``) or a batch.

    ``genie``, if given, is the true path-bit vector (shape ``(..., n)``); every
    leaf then records its raw log-likelihood but continues with the true bit.
    """
    llr = soft.llr if isinstance(soft, SoftObservation) else np.asarray(soft, dtype=float)
    if llr.shape[-1:] != (spec.n,):
        raise ValueError(f"soft input must have length {spec.n}, got shape {llr.shape}")
    if genie is not None:
        genie = np.broadcast_to(np.asarray(genie, dtype=np.uint8), llr.shape)
    walker = _Walker(spec, genie)
    codeword = walker.run(llr)
    bits = walker.decisions[..., list(spec.indices)]
    return DecodeOutput(
        spec=spec,
        bits=bits,
        codeword=codeword,
        leaf_llr=walker.leaf_llr,
        decisions=walker.decisions,
        combine_ops=walker.ops,
    )


def decoding_order(m: int) -> list[int]:
    """Path indices in the order SC visits the leaves (v before u everywhere)."""
    return list(range((1 << m) - 1, -1, -1))


def exact_leaf_posterior(
    spec: CodeSpec,
    soft: SoftObservation | np.ndarray,
    target: PathLike,
    decided: Mapping[PathLike, int],
) -> float:
    """Brute-force ``Pr{f_target = 0 | y, decided bits}``.

    ``decided`` must assign every path visited before ``target``; all later
    paths (frozen or not) are summed over with a uniform prior, which is the
    conditioning SC decoding performs.
    """
    q = soft.q if isinstance(soft, SoftObservation) else SoftObservation(soft).q
    if q.shape != (spec.n,):
        raise ValueError(f"soft input must have length {spec.n}")
    t = as_path(target)
    if t.m != spec.m:
        raise ValueError(f"target {t} has length {t.m}, expected {spec.m}")
    fixed = {as_path(p).index: int(b) for p, b in decided.items()}
    before = set(range(t.index + 1, spec.n))
    if set(fixed) != before:
        raise ValueError("decided bits must cover exactly the paths visited before the target")
    free = list(range(t.index + 1))
    if len(free) > ORACLE_MAX_FREE_BITS:
        raise ValueError(f"enumeration over 2^{len(free)} messages exceeds the oracle budget")

    f = np.zeros((1 << len(free), spec.n), dtype=np.uint8)
    for i, b in fixed.items():
        f[:, i] = b
    f[:, free] = np.array(list(product((0, 1), repeat=len(free))), dtype=np.uint8)
    c = plotkin_transform(f)
    weight = np.prod(np.where(c == 0, q, 1.0 - q), axis=1)
    total = weight.sum()
    if total <= 0.0:
        raise ValueError("decided bits are inconsistent with the observations")
    return float(weight[f[:, t.index] == 0].sum() / total)


def trial_uniforms(seed: int, start: int, stop: int, n: int) -> np.ndarray:
    """Uniforms for trials ``start..stop-1``; row ``t`` depends only on (seed, t).

    Each trial owns a fixed window of a counter-based Philox stream, so any
    chunking of the trial range reproduces the same numbers.
    """
    stride = -(-n // 4) * 4
    bg = np.random.Philox(key=int(seed))
    bg.advance(start * stride // 4)
    u = np.random.Generator(bg).random((stop - start) * stride)
    return u.reshape(stop - start, stride)[:, :n]


def _zero_codeword_soft(seed: int, start: int, stop: int, n: int, eps: float) -> np.ndarray:
    flips = trial_uniforms(seed, start, stop, n) < (1.0 - eps) / 2.0
    y = np.where(flips, -1, 1)
    return bsc_soft(y, eps).llr


@dataclass
class GenieReport:
    """Per-path genie-aided error counts with the exact moments attached."""

    paths: list[Path]
    trials: int
    errors: np.ndarray
    A: np.ndarray
    B: np.ndarray
    Z: np.ndarray
    epsilon: float
    seed: int
    sigmas: float = 5.0
    meta: dict = field(default_factory=dict)

    @property
    def rates(self) -> np.ndarray:
        return self.errors / self.trials

    def _slack(self, bound: np.ndarray) -> np.ndarray:
        return self.sigmas * np.sqrt(bound * (1.0 - bound) / self.trials)

    @property
    def z_bound_ok(self) -> np.ndarray:
        return self.rates <= self.Z + self._slack(self.Z)

    @property
    def b_bound_ok(self) -> np.ndarray:
        return self.rates <= self.B + self._slack(self.B)


def genie_error_rates(
    spec: CodeSpec,
    eps: float,
    trials: int,
    seed: int = 0,
    chunk: int = 4096,
) -> GenieReport:
    """Genie-aided SC over BSC(eps) with the all-zero codeword.

    A leaf counts as an error when its raw decision (``L < 0`` means bit 1) is
    wrong; decoding then proceeds with the true bit 0.
    """
    eps = _check_offset(eps)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    errors = np.zeros(spec.n, dtype=np.int64)
    genie = np.zeros(spec.n, dtype=np.uint8)
    for start in range(0, trials, chunk):
        stop = min(trials, start + chunk)
        llr = _zero_codeword_soft(seed, start, stop, spec.n, eps)
        out = sc_decode(spec, llr, genie=genie)
        errors += (out.leaf_llr < 0).sum(axis=0)
    base = CompoundBsc.bsc(eps)
    paths = list(spec.paths)
    mom = [moments(ensemble_along_path(base, p)) for p in paths]
    return GenieReport(
        paths=paths,
        trials=trials,
        errors=errors[list(spec.indices)],
        A=np.array([x.A for x in mom]),
        B=np.array([x.B for x in mom]),
        Z=np.array([x.Z for x in mom]),
        epsilon=eps,
        seed=seed,
    )


@dataclass
class BlockReport:
    trials: int
    block_errors: int
    bit_errors: int
    k: int

    @property
    def block_error_rate(self) -> float:
        return self.block_errors / self.trials

    @property
    def bit_error_rate(self) -> float:
        return self.bit_errors / (self.trials * self.k)


def block_error_rate(
    spec: CodeSpec, eps: float, trials: int, seed: int = 0, chunk: int = 1024
) -> BlockReport:
    """Free-running SC over BSC(eps) with the all-zero codeword."""
    eps = _check_offset(eps)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    blocks = bits = 0
    for start in range(0, trials, chunk):
        stop = min(trials, start + chunk)
        out = sc_decode(spec, _zero_codeword_soft(seed, start, stop, spec.n, eps))
        wrong = out.bits.astype(bool)
        blocks += int(wrong.any(axis=1).sum())
        bits += int(wrong.sum())
    return BlockReport(trials=trials, block_errors=blocks, bit_errors=bits, k=spec.k)
