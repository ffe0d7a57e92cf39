"""Generalized loops and their activities; the loop-series identity.

A generalized loop is an edge subset in which every touched node has
induced degree at least 2 (no dangling edges); it need not be connected,
and the empty subset counts as a loop with weight 1.  At any BP fixed
point the exact partition function factors as

    ln Z = n * f_bethe + ln( sum over generalized loops g of K(g) )

where the activity K(g) is a product of local node terms built from the
messages.  With m_i = tanh(h_i + sum_a eta_hat_{a->i}) and degree d:

    vertex term   K_i = [ (1-m_i)^(d-1) + (-1)^d (1+m_i)^(d-1) ]
                        / ( 2 (1-m_i^2)^(d-1) )

(equal to the centered moment E[(s - m_i)^d] / (1-m_i^2)^d of the node
belief, so it vanishes at m_i = 0 for odd d), and the check term K_a is
the centered correlation E_{b_a}[ prod_{i in N(a) cap g} (s_i - m_i) ] of
the check belief, evaluated as a product of per-edge square-root factors,
tanh factors over the untouched edges, and a parity ratio.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .bp import MessageSet, _cavity_products, update_residual
from .errors import CapExceeded, SingularInput
from .tanner import BipartiteGraph

BRUTE_EDGE_CAP = 26
DFS_EDGE_CAP = 63
FIXED_POINT_WARN_RESIDUAL = 1e-8


class LoopSumSignAnomaly(RuntimeError):
    """The loop-series sum came out nonpositive (its log is undefined)."""


@dataclass(frozen=True)
class GeneralizedLoop:
    """An edge subset with no dangling edges, tied to its host graph."""

    graph: BipartiteGraph
    edge_ids: tuple  # sorted edge indices into graph.edges

    def __post_init__(self):
        eids = tuple(sorted(set(int(e) for e in self.edge_ids)))
        for e in eids:
            if not (0 <= e < self.graph.num_edges):
                raise ValueError(f"edge id {e} out of range")
        object.__setattr__(self, "edge_ids", eids)
        bad = [
            (node, d)
            for node, d in list(self.var_degrees.items()) + [
                (("c", a), d) for a, d in self.check_degrees.items()
            ]
            if d == 1
        ]
        if bad:
            raise ValueError(f"dangling edges at nodes {bad}: not a generalized loop")

    @classmethod
    def from_mask(cls, graph: BipartiteGraph, mask: int) -> "GeneralizedLoop":
        eids = [k for k in range(graph.num_edges) if (int(mask) >> k) & 1]
        return cls(graph, tuple(eids))

    @classmethod
    def from_edges(cls, graph: BipartiteGraph, edges) -> "GeneralizedLoop":
        return cls(graph, tuple(graph.edge_index[tuple(e)] for e in edges))

    @classmethod
    def empty(cls, graph: BipartiteGraph) -> "GeneralizedLoop":
        return cls(graph, ())

    @property
    def mask(self) -> int:
        out = 0
        for e in self.edge_ids:
            out |= 1 << e
        return out

    @property
    def edges(self) -> tuple:
        return tuple(self.graph.edges[e] for e in self.edge_ids)

    @cached_property
    def var_degrees(self) -> dict:
        out: dict = {}
        for e in self.edge_ids:
            i = self.graph.edges[e][0]
            out[i] = out.get(i, 0) + 1
        return out

    @cached_property
    def check_degrees(self) -> dict:
        out: dict = {}
        for e in self.edge_ids:
            a = self.graph.edges[e][1]
            out[a] = out.get(a, 0) + 1
        return out

    @property
    def touched_vars(self) -> tuple:
        return tuple(sorted(self.var_degrees))

    @property
    def touched_checks(self) -> tuple:
        return tuple(sorted(self.check_degrees))

    @property
    def size(self) -> int:
        """Number of touched nodes, variables plus checks."""
        return len(self.var_degrees) + len(self.check_degrees)

    @property
    def is_empty(self) -> bool:
        return not self.edge_ids

    def is_connected(self) -> bool:
        """Connectivity of the edge subset (the empty loop is not connected)."""
        if self.is_empty:
            return False
        flags = _kernels.component_all_small(
            np.array([self.mask], dtype=np.uint64),
            self.graph.edge_var,
            self.graph.edge_check,
            self.graph.n,
            self.graph.m,
            float(self.size),  # one component of exactly `size` nodes => not "all small"
        )
        return not bool(flags[0])


# -- enumeration -------------------------------------------------------------


def loop_masks(
    g: BipartiteGraph, method: str = "auto", brute_cap: int = BRUTE_EDGE_CAP
) -> np.ndarray:
    """All generalized-loop bitmasks of g, ascending, empty loop included.

    method 'brute' filters all 2^E edge subsets (the oracle enumerator,
    capped at `brute_cap` edges); 'dfs' walks a pruned decision tree and
    handles up to 63 edges; 'auto' is 'dfs'.
    """
    E = g.num_edges
    if method == "auto":
        method = "dfs"
    if method == "brute":
        if E > brute_cap:
            raise CapExceeded(f"brute enumeration over 2^{E} subsets exceeds cap 2^{brute_cap}")
        return _kernels.brute_loop_masks(g.edge_var, g.edge_check, g.n, g.m)
    if method == "dfs":
        if E > DFS_EDGE_CAP:
            raise CapExceeded(f"{E} edges exceed the {DFS_EDGE_CAP}-edge mask limit")
        return _kernels.dfs_loop_masks(g.edge_var, g.edge_check, g.n, g.m)
    raise ValueError(f"unknown enumeration method {method!r}")


def enumerate_generalized_loops(
    g: BipartiteGraph, method: str = "auto", brute_cap: int = BRUTE_EDGE_CAP
):
    """Yield every generalized loop of g exactly once (empty loop first)."""
    for mask in loop_masks(g, method=method, brute_cap=brute_cap):
        yield GeneralizedLoop.from_mask(g, int(mask))


# -- activities --------------------------------------------------------------


def vertex_activity(d: int, m_i: float) -> float:
    """Variable-node activity for induced degree d and belief mean m_i.

    Closed form of E[(s - m)^d] / (1 - m^2)^d over s = +-1 with mean m;
    at m=0 it is 1 for even d and 0 for odd d.

    Raises:
        SingularInput: |m_i| = 1.
    """
    if d < 2:
        raise ValueError("induced degrees in a generalized loop are >= 2")
    if abs(m_i) >= 1.0:
        raise SingularInput(f"belief mean {m_i} is at the +-1 singularity")
    return ((1.0 - m_i) ** (d - 1) + (-1.0) ** d * (1.0 + m_i) ** (d - 1)) / (
        2.0 * (1.0 - m_i * m_i) ** (d - 1)
    )


def belief_means(g: BipartiteGraph, h_fields, msgs: MessageSet) -> np.ndarray:
    """m_i = tanh(h_i + sum_{a in N(i)} eta_hat_{a->i}) for every variable."""
    h_fields = np.asarray(h_fields, dtype=np.float64)
    sum_hat = np.bincount(g.edge_var, weights=msgs.eta_hat, minlength=g.n)
    return np.tanh(h_fields + sum_hat)


def check_activity(
    g: BipartiteGraph, a: int, loop: GeneralizedLoop, msgs: MessageSet, m_values
) -> float:
    """Check-node activity K_a for a check touched by the loop.

    The product of: sqrt((1-t_e^2)/(1-cav_e^2)) over loop edges at a (t_e
    the tanh message on the edge, cav_e the tanh product over the other
    edges of a); tanh factors over the non-loop edges of a; the parity
    ratio (1 + (-1)^d P^(d-1)) / (1 + P) with P the full tanh product and
    d the induced degree; and sqrt(1 - m_i^2) over loop edges at a.

    Raises:
        SingularInput: 1 + P = 0, or a cavity product at +-1.
    """
    m_values = np.asarray(m_values, dtype=np.float64)
    d = loop.check_degrees.get(a)
    if d is None:
        raise ValueError(f"check {a} is not touched by the loop")
    t = np.tanh(msgs.eta)
    eids = g.check_edge_ids[a]
    P = float(np.prod(t[list(eids)]))
    if 1.0 + P == 0.0:
        raise SingularInput(f"check {a}: 1 + prod tanh = 0")
    in_loop = set(loop.edge_ids)
    w = (1.0 + (-1.0) ** d * P ** (d - 1)) / (1.0 + P)
    for e in eids:
        i = g.edges[e][0]
        if e in in_loop:
            cav = float(np.prod([t[e2] for e2 in eids if e2 != e]))
            if abs(cav) >= 1.0:
                raise SingularInput(f"edge {e}: cavity tanh product at +-1")
            w *= math.sqrt((1.0 - t[e] ** 2) / (1.0 - cav**2))
            w *= math.sqrt(1.0 - m_values[i] ** 2)
        else:
            w *= t[e]
    return w


@dataclass(frozen=True)
class ActivityContext:
    """Per-edge and per-node tables from which every K(g) is a product.

    ki_table[i, d] is the vertex activity of variable i at induced degree
    d (1 at d=0); ratio_table[a, d] the parity ratio of check a; s_in[e]
    the combined square-root factor a loop edge contributes at its check;
    t[e] the tanh factor a non-loop edge contributes at a touched check.
    """

    graph: BipartiteGraph
    t: np.ndarray
    s_in: np.ndarray
    ki_table: np.ndarray
    ratio_table: np.ndarray
    m_values: np.ndarray


def activity_context(g: BipartiteGraph, h_fields, msgs: MessageSet) -> ActivityContext:
    """Precompute activity tables for weight evaluation over many loops."""
    if msgs.is_trivial:
        raise SingularInput("activities are undefined at the trivial all-ones solution")
    m_values = belief_means(g, h_fields, msgs)
    if np.any(np.abs(m_values) >= 1.0):
        raise SingularInput("some belief mean is at the +-1 singularity")
    t = np.tanh(msgs.eta)
    cav = _cavity_products(g, t)
    if np.any(np.abs(cav) >= 1.0):
        raise SingularInput("some cavity tanh product is at +-1")
    m_edge = m_values[g.edge_var]
    s_in = np.sqrt((1.0 - t**2) * (1.0 - m_edge**2) / (1.0 - cav**2))

    lmax = g.max_var_degree
    ki_table = np.zeros((g.n, lmax + 1))
    ki_table[:, 0] = 1.0
    for d in range(2, lmax + 1):
        ki_table[:, d] = (
            (1.0 - m_values) ** (d - 1) + (-1.0) ** d * (1.0 + m_values) ** (d - 1)
        ) / (2.0 * (1.0 - m_values**2) ** (d - 1))

    rmax = g.max_check_degree
    P = np.ones(g.m)
    np.multiply.at(P, g.edge_check, t)
    if np.any(1.0 + P == 0.0):
        raise SingularInput("some check has 1 + prod tanh = 0")
    ratio_table = np.zeros((g.m, rmax + 1))
    ratio_table[:, 0] = 1.0
    for d in range(2, rmax + 1):
        ratio_table[:, d] = (1.0 + (-1.0) ** d * P ** (d - 1)) / (1.0 + P)
    return ActivityContext(g, t, s_in, ki_table, ratio_table, m_values)


def loop_weight_array(ctx: ActivityContext, masks: np.ndarray) -> np.ndarray:
    """K(g) for every mask, via the precomputed tables."""
    g = ctx.graph
    return _kernels.loop_weights(
        np.asarray(masks, dtype=np.uint64),
        g.edge_var,
        g.edge_check,
        g.n,
        g.m,
        ctx.s_in,
        ctx.t,
        ctx.ki_table,
        ctx.ratio_table,
    )


def loop_weight(
    loop: GeneralizedLoop, msgs: MessageSet, h_fields, warn_residual: bool | None = None
) -> float:
    """Activity K(g) of one loop; K(empty) = 1.

    The loop series is an identity only at BP fixed points; a warning is
    emitted when the messages are visibly off a fixed point.
    """
    g = loop.graph
    if warn_residual is None:
        warn_residual = True
    if warn_residual:
        res = update_residual(g, h_fields, msgs)
        if res > FIXED_POINT_WARN_RESIDUAL:
            warnings.warn(
                f"messages are not a BP fixed point (sweep residual {res:.3e}); "
                "loop activities lose their identity meaning",
                stacklevel=2,
            )
    ctx = activity_context(g, h_fields, msgs)
    return float(loop_weight_array(ctx, np.array([loop.mask], dtype=np.uint64))[0])


def loop_series_sum(
    g: BipartiteGraph,
    msgs: MessageSet,
    h_fields,
    method: str = "auto",
    brute_cap: int = BRUTE_EDGE_CAP,
    warn_residual: bool = True,
) -> float:
    """Sum of K(g) over every generalized loop, the empty one included."""
    if warn_residual:
        res = update_residual(g, h_fields, msgs)
        if res > FIXED_POINT_WARN_RESIDUAL:
            warnings.warn(
                f"messages are not a BP fixed point (sweep residual {res:.3e})",
                stacklevel=2,
            )
    masks = loop_masks(g, method=method, brute_cap=brute_cap)
    ctx = activity_context(g, h_fields, msgs)
    return float(loop_weight_array(ctx, masks).sum())


@dataclass(frozen=True)
class LoopIdentityReport:
    residual: float
    ln_z_per_n: float
    f_bethe: float
    loop_sum: float
    loop_count: int
    bp_residual: float


def verify_loop_identity(
    g: BipartiteGraph,
    h_fields,
    msgs: MessageSet,
    method: str = "auto",
    brute_cap: int = BRUTE_EDGE_CAP,
    masks: np.ndarray | None = None,
) -> LoopIdentityReport:
    """Measure |ln Z / n - f_bethe - ln(sum K)/n| against exact enumeration.

    Pass precomputed `masks` to amortize enumeration over several field
    configurations on the same graph.

    Raises:
        LoopSumSignAnomaly: the loop sum is nonpositive (expected only for
            messages far from any BP fixed point).
    """
    from .bethe import bethe_free_energy
    from .exact import log_partition

    bp_res = update_residual(g, h_fields, msgs)
    if masks is None:
        masks = loop_masks(g, method=method, brute_cap=brute_cap)
    ctx = activity_context(g, h_fields, msgs)
    total = float(loop_weight_array(ctx, masks).sum())
    ln_z = log_partition(g, h_fields) / g.n
    f = bethe_free_energy(g, h_fields, msgs)
    if total <= 0.0:
        raise LoopSumSignAnomaly(
            f"loop sum {total:.6g} <= 0 (bp sweep residual {bp_res:.3e}, "
            f"ln Z/n = {ln_z:.6g}, f_bethe = {f:.6g})"
        )
    return LoopIdentityReport(
        residual=abs(ln_z - f - math.log(total) / g.n),
        ln_z_per_n=ln_z,
        f_bethe=f,
        loop_sum=total,
        loop_count=int(masks.shape[0]),
        bp_residual=bp_res,
    )
