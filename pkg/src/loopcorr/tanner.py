"""Bipartite factor graphs, GF(2) linear algebra, expansion checks.

Variable nodes are indexed 0..n-1, check nodes 0..m-1.  Edges are
(variable, check) pairs held in a canonical sorted order; the position of
an edge in that order is its edge id, used everywhere else in the package
(messages, loop bitmasks).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    AlistError,
    CapExceeded,
    InfeasibleParameters,
    NoRootFound,
    RejectionBudgetExhausted,
)

EXPANDER_SUBSET_CAP = 10**7
LAMBDA0_GRID_POINTS = 10**6


@dataclass(frozen=True)
class BipartiteGraph:
    """Immutable bipartite graph between n variable nodes and m check nodes.

    Degrees are unconstrained; used for small oracle graphs (trees, cycles,
    single checks).  `TannerGraph` adds the biregularity contract.
    """

    n: int
    m: int
    edges: tuple = field(default=())

    def __post_init__(self):
        edges = tuple(sorted((int(i), int(a)) for i, a in self.edges))
        if len(set(edges)) != len(edges):
            raise InfeasibleParameters("parallel edges are not allowed")
        for i, a in edges:
            if not (0 <= i < self.n and 0 <= a < self.m):
                raise InfeasibleParameters(f"edge ({i},{a}) out of range")
        object.__setattr__(self, "edges", edges)

    # -- derived structure (cached; the dataclass itself stays frozen) --

    @cached_property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_var(self) -> np.ndarray:
        return np.array([i for i, _ in self.edges], dtype=np.int64)

    @cached_property
    def edge_check(self) -> np.ndarray:
        return np.array([a for _, a in self.edges], dtype=np.int64)

    @cached_property
    def edge_index(self) -> dict:
        return {e: k for k, e in enumerate(self.edges)}

    @cached_property
    def var_neighbors(self) -> tuple:
        out = [[] for _ in range(self.n)]
        for i, a in self.edges:
            out[i].append(a)
        return tuple(tuple(x) for x in out)

    @cached_property
    def check_neighbors(self) -> tuple:
        out = [[] for _ in range(self.m)]
        for i, a in self.edges:
            out[a].append(i)
        return tuple(tuple(x) for x in out)

    @cached_property
    def var_edge_ids(self) -> tuple:
        out = [[] for _ in range(self.n)]
        for k, (i, _) in enumerate(self.edges):
            out[i].append(k)
        return tuple(tuple(x) for x in out)

    @cached_property
    def check_edge_ids(self) -> tuple:
        out = [[] for _ in range(self.m)]
        for k, (_, a) in enumerate(self.edges):
            out[a].append(k)
        return tuple(tuple(x) for x in out)

    @cached_property
    def var_degrees(self) -> np.ndarray:
        return np.bincount(self.edge_var, minlength=self.n).astype(np.int64)

    @cached_property
    def check_degrees(self) -> np.ndarray:
        return np.bincount(self.edge_check, minlength=self.m).astype(np.int64)

    @property
    def max_var_degree(self) -> int:
        return int(self.var_degrees.max()) if self.num_edges else 0

    @property
    def max_check_degree(self) -> int:
        return int(self.check_degrees.max()) if self.num_edges else 0

    def relabeled(self, var_perm, check_perm) -> "BipartiteGraph":
        """Return the graph with nodes renamed by the given permutations."""
        edges = [(var_perm[i], check_perm[a]) for i, a in self.edges]
        return BipartiteGraph(self.n, self.m, tuple(edges))


@dataclass(frozen=True)
class TannerGraph(BipartiteGraph):
    """(l,r)-biregular bipartite graph: the Tanner graph of a regular code."""

    l: int = 0
    r: int = 0

    def __post_init__(self):
        super().__post_init__()
        if self.m * self.r != self.n * self.l:
            raise InfeasibleParameters(
                f"degree accounting violated: m*r={self.m * self.r} != n*l={self.n * self.l}"
            )
        if not np.all(self.var_degrees == self.l):
            raise InfeasibleParameters("some variable node does not have degree l")
        if not np.all(self.check_degrees == self.r):
            raise InfeasibleParameters("some check node does not have degree r")

    def relabeled(self, var_perm, check_perm) -> "TannerGraph":
        edges = [(var_perm[i], check_perm[a]) for i, a in self.edges]
        return TannerGraph(self.n, self.m, tuple(edges), l=self.l, r=self.r)


def generate_regular(n: int, l: int, r: int, seed, max_tries: int = 200_000) -> TannerGraph:
    """Sample a uniform simple (l,r)-biregular graph on n variable nodes.

    Draws a uniform configuration-model matching of the n*l half-edge stubs
    and rejects the whole matching whenever a parallel edge appears, so the
    output is uniform over simple biregular graphs.  The same seed and
    parameters always reproduce the same graph.

    Args:
        n: number of variable nodes.
        l: variable degree (>= 2).
        r: check degree (r <= n, and n*l divisible by r).
        seed: integer seed or a numpy Generator.
        max_tries: rejection budget before giving up.

    Raises:
        InfeasibleParameters: impossible (n, l, r).
        RejectionBudgetExhausted: no simple matching found within budget.
    """
    if l < 2:
        raise InfeasibleParameters("variable degree l must be at least 2")
    if (n * l) % r != 0:
        raise InfeasibleParameters(f"n*l={n * l} not divisible by r={r}")
    if r > n:
        raise InfeasibleParameters(f"check degree r={r} exceeds n={n}")
    m = n * l // r
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    var_stubs = np.repeat(np.arange(n), l)
    check_stubs = np.repeat(np.arange(m), r)
    for _ in range(max_tries):
        v = var_stubs[rng.permutation(n * l)]
        key = v * np.int64(m) + check_stubs
        key.sort()
        if np.all(key[1:] != key[:-1]):
            edges = tuple(zip(v.tolist(), check_stubs.tolist()))
            return TannerGraph(n, m, edges, l=l, r=r)
    raise RejectionBudgetExhausted(
        f"no simple ({l},{r})-biregular graph on n={n} within {max_tries} matchings"
    )


def parity_check_matrix(g: BipartiteGraph) -> np.ndarray:
    """Dense m-by-n GF(2) parity-check matrix with H[a, i] = 1 iff (i,a) is an edge."""
    H = np.zeros((g.m, g.n), dtype=np.uint8)
    H[g.edge_check, g.edge_var] = 1
    return H


def gf2_row_reduce(M: np.ndarray):
    """Row-reduce a binary matrix over GF(2) with XOR row operations.

    Returns:
        (R, pivot_cols): reduced matrix (pivot columns cleared above and
        below) and the list of pivot column indices; rank = len(pivot_cols).
    """
    R = (np.asarray(M, dtype=np.uint8) % 2).copy()
    rows, cols = R.shape
    pivot_cols = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        hits = np.nonzero(R[row:, col])[0]
        if hits.size == 0:
            continue
        piv = row + hits[0]
        if piv != row:
            R[[row, piv]] = R[[piv, row]]
        others = np.nonzero(R[:, col])[0]
        for r2 in others:
            if r2 != row:
                R[r2] ^= R[row]
        pivot_cols.append(col)
        row += 1
    return R, pivot_cols


def gf2_rank(M: np.ndarray) -> int:
    """Rank of a binary matrix over GF(2)."""
    return len(gf2_row_reduce(M)[1])


def gf2_nullspace(M: np.ndarray) -> np.ndarray:
    """Basis of the GF(2) kernel {x : M x = 0 mod 2}, one vector per row."""
    R, pivot_cols = gf2_row_reduce(M)
    cols = R.shape[1]
    free_cols = [c for c in range(cols) if c not in pivot_cols]
    basis = np.zeros((len(free_cols), cols), dtype=np.uint8)
    for b, fc in enumerate(free_cols):
        basis[b, fc] = 1
        for row, pc in enumerate(pivot_cols):
            if R[row, fc]:
                basis[b, pc] = 1
    return basis


@dataclass(frozen=True)
class ExpanderReport:
    """Outcome of an exhaustive vertex-expansion check."""

    is_expander: bool
    witness: tuple | None  # a violating variable subset, if any
    subsets_checked: int


def _subset_budget(n: int, smax: int) -> int:
    return sum(math.comb(n, s) for s in range(1, smax + 1))


def is_expander(
    g: TannerGraph, lam: float, kappa: float, subset_cap: int = EXPANDER_SUBSET_CAP
) -> ExpanderReport:
    """Exhaustively test whether g is a (lam, kappa) vertex expander.

    Every variable subset V with |V| < lam*n must see at least kappa*l*|V|
    distinct check nodes.  Subsets are enumerated by increasing size with
    early exit; the total number of subsets is capped.

    Raises:
        CapExceeded: the subset space is larger than subset_cap; the check
            refuses rather than approximating.
    """
    if not (0 < lam <= 1):
        raise ValueError("lambda must lie in (0, 1]")
    if not (0 < kappa < 1):
        raise ValueError("kappa must lie in (0, 1)")
    lam_n = lam * g.n
    smax = int(math.ceil(lam_n)) - 1 if lam_n == int(lam_n) else int(lam_n)
    smax = min(smax, g.n)
    if smax < 1:
        return ExpanderReport(True, None, 0)
    budget = _subset_budget(g.n, smax)
    if budget > subset_cap:
        raise CapExceeded(
            f"expander check needs {budget} subsets (> cap {subset_cap})"
        )
    nbr_mask = [0] * g.n
    for i, a in g.edges:
        nbr_mask[i] |= 1 << a
    checked = 0
    for s in range(1, smax + 1):
        need = kappa * g.l * s
        for sub in itertools.combinations(range(g.n), s):
            checked += 1
            u = 0
            for i in sub:
                u |= nbr_mask[i]
            if u.bit_count() < need:
                return ExpanderReport(False, sub, checked)
    return ExpanderReport(True, None, checked)


def binary_entropy(x: float) -> float:
    """h2(x) = -x ln x - (1-x) ln(1-x), in nats."""
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"entropy argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log(1.0 - x)


def admissible_kappa_interval(l: int, r: int) -> tuple:
    """Open interval of expansion constants usable by the polymer bounds."""
    return (1.0 - 2.0 * (r - 1) / (l * r), 1.0 - 1.0 / l)


def expansion_threshold(
    l: int, r: int, kappa: float, grid_points: int = LAMBDA0_GRID_POINTS
) -> float:
    """Largest subset fraction below which random graphs expand w.h.p.

    Solves, for the smallest positive root lambda0, the first-moment rate
    equation for (lam, kappa) vertex expansion of a random (l,r)-biregular
    bipartite graph:

        (l-1)/l * h2(lam) - (1/r) * h2(lam*kappa*r) - lam*kappa*r * h2(1/(kappa*r)) = 0

    evaluated with natural-log entropies (the equation is homogeneous in
    the entropy base, so the root does not depend on that choice).  The
    root is located by a uniform sign-change scan followed by bisection.

    Warns if kappa lies outside the admissible interval
    (1 - 2(r-1)/(lr), 1 - 1/l) required by the activity bounds downstream.

    Raises:
        NoRootFound: no sign change on the scan grid.
    """
    lo_k, hi_k = admissible_kappa_interval(l, r)
    if not (lo_k < kappa < hi_k):
        warnings.warn(
            f"kappa={kappa:.6g} outside admissible interval ({lo_k:.6g}, {hi_k:.6g})",
            stacklevel=2,
        )
    kr = kappa * r
    if kr <= 1.0:
        raise ValueError("kappa*r must exceed 1 for the rate equation to make sense")

    c3 = kr * binary_entropy(1.0 / kr)

    def rate(lam: float) -> float:
        return (
            (l - 1) / l * binary_entropy(lam)
            - binary_entropy(lam * kr) / r
            - lam * c3
        )

    eps = 1e-9
    hi = 1.0 / kr - eps
    grid = np.linspace(eps, hi, grid_points)
    xprev, fprev = float(grid[0]), rate(grid[0])
    bracket = None
    for x in grid[1:]:
        cur = rate(x)
        if fprev == 0.0:
            return xprev
        if (fprev > 0) != (cur > 0):
            bracket = (xprev, float(x))
            break
        xprev, fprev = float(x), cur
    if bracket is None:
        raise NoRootFound(
            f"rate equation for (l={l}, r={r}, kappa={kappa}) has no sign change "
            f"on ({eps:g}, {hi:g}) with {grid_points} points"
        )
    a, b = bracket
    fa = rate(a)
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = rate(mid)
        if fm == 0.0:
            return mid
        if (fa > 0) == (fm > 0):
            a, fa = mid, fm
        else:
            b = mid
        if b - a < 1e-18 + 1e-16 * a:
            break
    root = 0.5 * (a + b)
    assert abs(rate(root)) < 1e-10, "bisection failed to reach residual tolerance"
    return root


# -- alist serialization ---------------------------------------------------
#
# Line 1: "n m"; line 2: "lmax rmax"; line 3: the n column (variable)
# degrees; line 4: the m row (check) degrees; then n lines of 1-based check
# indices per variable and m lines of 1-based variable indices per check.


def save_alist(g: BipartiteGraph) -> bytes:
    """Serialize a graph in the alist sparse-matrix format (1-based)."""
    lines = [
        f"{g.n} {g.m}",
        f"{g.max_var_degree} {g.max_check_degree}",
        " ".join(str(d) for d in g.var_degrees.tolist()),
        " ".join(str(d) for d in g.check_degrees.tolist()),
    ]
    for i in range(g.n):
        lines.append(" ".join(str(a + 1) for a in g.var_neighbors[i]))
    for a in range(g.m):
        lines.append(" ".join(str(i + 1) for i in g.check_neighbors[a]))
    return ("\n".join(lines) + "\n").encode("ascii")


def load_alist(data: bytes) -> BipartiteGraph:
    """Parse alist bytes back into a graph; inverse of `save_alist`.

    Returns a TannerGraph when the degrees are biregular, else a
    BipartiteGraph.

    Raises:
        AlistError: malformed header, inconsistent degrees, index out of
            range (indices are 1-based; 0 is rejected).
    """
    if isinstance(data, bytes):
        data = data.decode("ascii")
    rows = [line.split() for line in data.splitlines() if line.strip()]
    if len(rows) < 4:
        raise AlistError("alist needs at least 4 header lines")
    try:
        header = [[int(tok) for tok in row] for row in rows]
    except ValueError as exc:
        raise AlistError(f"non-integer token: {exc}") from None
    if len(header[0]) != 2 or len(header[1]) != 2:
        raise AlistError("first two lines must each hold exactly two integers")
    n, m = header[0]
    lmax, rmax = header[1]
    if len(rows) != 4 + n + m:
        raise AlistError(f"expected {4 + n + m} lines, found {len(rows)}")
    var_deg = header[2]
    check_deg = header[3]
    if len(var_deg) != n or len(check_deg) != m:
        raise AlistError("degree line lengths do not match n, m")
    if var_deg and max(var_deg) != lmax:
        raise AlistError("declared max column degree does not match degree list")
    if check_deg and max(check_deg) != rmax:
        raise AlistError("declared max row degree does not match degree list")
    edges = []
    for i in range(n):
        nbrs = header[4 + i]
        if len(nbrs) != var_deg[i]:
            raise AlistError(f"variable {i} lists {len(nbrs)} neighbors, degree says {var_deg[i]}")
        for a1 in nbrs:
            if not (1 <= a1 <= m):
                raise AlistError(f"check index {a1} out of range 1..{m} (indices are 1-based)")
            edges.append((i, a1 - 1))
    check_lists = [[] for _ in range(m)]
    for a in range(m):
        nbrs = header[4 + n + a]
        if len(nbrs) != check_deg[a]:
            raise AlistError(f"check {a} lists {len(nbrs)} neighbors, degree says {check_deg[a]}")
        for i1 in nbrs:
            if not (1 <= i1 <= n):
                raise AlistError(f"variable index {i1} out of range 1..{n} (indices are 1-based)")
            check_lists[a].append(i1 - 1)
    from_checks = sorted((i, a) for a in range(m) for i in check_lists[a])
    edges = sorted(set(edges))
    if edges != from_checks:
        raise AlistError("variable-side and check-side adjacency lists disagree")
    if var_deg and check_deg and min(var_deg) == lmax and min(check_deg) == rmax:
        return TannerGraph(n, m, tuple(edges), l=lmax, r=rmax)
    return BipartiteGraph(n, m, tuple(edges))
