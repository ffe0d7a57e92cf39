"""Binary symmetric channel under the all-zero-codeword convention.

The transmitted word is fixed to all zeros; a channel output is the bit
vector y of flips.  Evidence enters the Gibbs measure through per-bit
half-log-likelihood fields h_i = (-1)^{y_i} * h with h = ln((1-p)/p) / 2,
so |h_i| = h everywhere and the high-noise regime is small h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded, SingularInput

OUTPUT_ENUM_CAP = 22


def half_llr(p: float) -> float:
    """Half log-likelihood magnitude h = ln((1-p)/p) / 2 of a BSC flip rate.

    Strictly decreasing on (0,1), zero at p=1/2, and antisymmetric about
    1/2.  Raises SingularInput at p in {0, 1} where it would be infinite.
    """
    if not (0.0 < p < 1.0):
        raise SingularInput(f"flip probability {p} gives an infinite log-likelihood")
    return 0.5 * math.log((1.0 - p) / p)


@dataclass(frozen=True)
class ChannelRealization:
    """One BSC output: flip bits y and the induced fields h_i = (-1)^{y_i} h."""

    p: float
    y: np.ndarray  # uint8 flip indicators, length n

    def __post_init__(self):
        object.__setattr__(self, "y", np.asarray(self.y, dtype=np.uint8))
        if self.y.ndim != 1:
            raise ValueError("y must be a flat bit vector")
        half_llr(self.p)  # validates p

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def h(self) -> float:
        return half_llr(self.p)

    @property
    def h_fields(self) -> np.ndarray:
        """Per-bit fields h_i, sign flipped wherever y_i = 1."""
        return np.where(self.y == 1, -self.h, self.h)

    @property
    def flip_count(self) -> int:
        return int(self.y.sum())


def sample_bsc(n: int, p: float, seed) -> ChannelRealization:
    """Draw y_i ~ Bernoulli(p) i.i.d.; deterministic for a fixed seed."""
    half_llr(p)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    y = (rng.random(n) < p).astype(np.uint8)
    return ChannelRealization(p=p, y=y)


def uniform_fields(n: int, h: float) -> np.ndarray:
    """All-plus field vector for a noiseless-sign output at magnitude h."""
    return np.full(n, float(h))


def enumerate_outputs(n: int, p: float, cap: int = OUTPUT_ENUM_CAP):
    """Yield every output (ChannelRealization, probability), all 2^n of them.

    The probability of a weight-w output is p^w (1-p)^(n-w); the yielded
    probabilities sum to 1.  Outputs follow binary counting with y_0 as the
    least significant bit.

    Raises:
        CapExceeded: n exceeds the cap (2^n outputs would be enumerated).
    """
    half_llr(p)
    if n > cap:
        raise CapExceeded(f"2^{n} channel outputs exceed cap 2^{cap}")
    shifts = np.arange(n, dtype=np.uint64)
    for code in range(1 << n):
        y = ((np.uint64(code) >> shifts) & np.uint64(1)).astype(np.uint8)
        w = int(y.sum())
        prob = (p**w) * ((1.0 - p) ** (n - w))
        yield ChannelRealization(p=p, y=y), prob
