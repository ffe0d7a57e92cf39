"""Brute-force ground truth: exact log-partition and conditional entropy.

All quantities here are computed by exhaustive enumeration (over the
codeword kernel and over channel outputs) and serve as oracles for the
message-passing and loop-series machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channel import OUTPUT_ENUM_CAP, half_llr
from .errors import CapExceeded
from .tanner import BipartiteGraph, gf2_nullspace, gf2_rank, parity_check_matrix

KERNEL_DIM_CAP = 26


@dataclass(frozen=True)
class CodewordBasis:
    """GF(2) basis of the code (kernel of the parity-check matrix)."""

    basis: np.ndarray  # uint8, shape (k, n)
    rank: int  # rank of H; k = n - rank

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]


def codeword_basis(g: BipartiteGraph) -> CodewordBasis:
    """Kernel basis of the graph's parity-check matrix over GF(2)."""
    H = parity_check_matrix(g)
    basis = gf2_nullspace(H)
    return CodewordBasis(basis=basis, rank=g.n - basis.shape[0])


def log_partition(g: BipartiteGraph, h_fields, cap: int = KERNEL_DIM_CAP) -> float:
    """ln Z = ln sum over codewords x of exp(sum_i (-1)^{x_i} h_i).

    Enumerates the 2^k kernel by a Gray-code walk with incremental field
    updates (compiled backend) or blocked matrix enumeration (fallback);
    both are exact up to floating point.

    Raises:
        CapExceeded: kernel dimension k = n - rank(H) exceeds the cap.
    """
    cw = codeword_basis(g)
    if cw.dimension > cap:
        raise CapExceeded(
            f"kernel dimension {cw.dimension} exceeds cap {cap} (2^k codewords)"
        )
    h_fields = np.asarray(h_fields, dtype=np.float64)
    if h_fields.shape != (g.n,):
        raise ValueError("h_fields must have one entry per variable node")
    return float(_kernels.span_logz(cw.basis, h_fields))


def _all_codewords(basis: np.ndarray, n: int) -> np.ndarray:
    """Dense (2^k, n) uint8 array of all codewords in the span."""
    k = basis.shape[0]
    idx = np.arange(1 << k, dtype=np.uint64)
    bits = ((idx[:, None] >> np.arange(k, dtype=np.uint64)[None, :]) & np.uint64(1)).astype(
        np.uint8
    )
    return (bits @ basis) % 2


def conditional_entropy_exact(
    g: BipartiteGraph, p: float, output_cap: int = OUTPUT_ENUM_CAP, kernel_cap: int = KERNEL_DIM_CAP
) -> float:
    """Per-bit conditional entropy via the free-energy identity.

    H(X|Y)/n = (1/n) E_y[ln Z(h(y))] - (1-2p)/2 * ln((1-p)/p), with the
    expectation taken exactly over all 2^n channel outputs.
    """
    if g.n > output_cap:
        raise CapExceeded(f"2^{g.n} outputs exceed cap 2^{output_cap}")
    cw = codeword_basis(g)
    if cw.dimension > kernel_cap:
        raise CapExceeded("kernel dimension over cap")
    h = half_llr(p)
    n = g.n
    # all outputs x all codewords, vectorized: S[y, x] = sum_i h_i(y) (-1)^{x_i}
    X = _all_codewords(cw.basis, n)  # (2^k, n)
    sign_x = 1.0 - 2.0 * X.astype(np.float64)  # +1 for bit 0
    idx = np.arange(1 << n, dtype=np.uint64)
    ybits = ((idx[:, None] >> np.arange(n, dtype=np.uint64)[None, :]) & np.uint64(1)).astype(
        np.float64
    )
    h_y = h * (1.0 - 2.0 * ybits)  # (2^n, n)
    S = h_y @ sign_x.T  # (2^n, 2^k)
    Smax = S.max(axis=1, keepdims=True)
    ln_z = Smax[:, 0] + np.log(np.exp(S - Smax).sum(axis=1))
    w = ybits.sum(axis=1)
    log_prob = w * math.log(p) + (n - w) * math.log1p(-p)
    e_lnz = float(np.exp(log_prob) @ ln_z)
    return e_lnz / n - (1.0 - 2.0 * p) / 2.0 * math.log((1.0 - p) / p)


def conditional_entropy_direct(
    g: BipartiteGraph, p: float, output_cap: int = OUTPUT_ENUM_CAP, kernel_cap: int = KERNEL_DIM_CAP
) -> float:
    """Per-bit conditional entropy from the joint distribution, H(X|Y)/n.

    X is uniform over the codewords, Y the BSC output of X; computes
    -sum_y P(y) sum_x p(x|y) ln p(x|y) by full enumeration, with no use of
    the Gibbs/free-energy identity.  Independent oracle for
    `conditional_entropy_exact`.
    """
    if g.n > output_cap:
        raise CapExceeded(f"2^{g.n} outputs exceed cap 2^{output_cap}")
    cw = codeword_basis(g)
    if cw.dimension > kernel_cap:
        raise CapExceeded("kernel dimension over cap")
    half_llr(p)  # validates p
    n = g.n
    X = _all_codewords(cw.basis, n).astype(np.float64)  # (2^k, n)
    idx = np.arange(1 << n, dtype=np.uint64)
    Y = ((idx[:, None] >> np.arange(n, dtype=np.uint64)[None, :]) & np.uint64(1)).astype(
        np.float64
    )
    # Hamming distances d(x, y) = |x| + |y| - 2 x.y
    wx = X.sum(axis=1)
    wy = Y.sum(axis=1)
    D = wy[:, None] + wx[None, :] - 2.0 * (Y @ X.T)
    logW = D * math.log(p) + (n - D) * math.log1p(-p)  # ln P(y|x)
    W = np.exp(logW)
    num_codewords = X.shape[0]
    Py = W.mean(axis=1)  # P(y) with uniform prior on codewords
    # p(x|y) = W / (|code| P(y)); joint P(x,y) = W / |code|
    log_post = logW - np.log(num_codewords * Py)[:, None]
    joint = W / num_codewords
    return float(-(joint * log_post).sum()) / n
