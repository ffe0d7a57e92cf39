"""Belief propagation message passing on bipartite factor graphs.

Messages live on directed edges: eta[k] is the variable-to-check message
on edge k, eta_hat[k] the check-to-variable message on the same edge.  One
sweep maps (eta, eta_hat) -> (eta', eta_hat') with

    eta'_{i->a}  = h_i + sum_{b in N(i) \\ a} eta_hat_{b->i}
    eta_hat'_{a->i} = atanh( prod_{j in N(a) \\ i} tanh eta_{j->a} )

computed in a flooding (fully parallel) schedule from the old iterate, then
damped by a convex combination with the old messages.  The all-ones fixed
point of the tanh system (infinite messages) is representable only through
an explicit sentinel, never as overflowing floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .tanner import BipartiteGraph

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000
DEFAULT_DAMPING = 0.5
TANH_CLAMP = 1e-12  # cavity tanh products are clamped to 1 - TANH_CLAMP


@dataclass(frozen=True)
class MessageSet:
    """BP messages on every directed edge of a graph."""

    graph: BipartiteGraph
    eta: np.ndarray
    eta_hat: np.ndarray
    is_trivial: bool = False  # sentinel for the tanh = 1 solution
    clamped: bool = field(default=False, compare=False)  # diagnostics only

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=np.float64)
        eta_hat = np.asarray(self.eta_hat, dtype=np.float64)
        if eta.shape != (self.graph.num_edges,) or eta_hat.shape != (self.graph.num_edges,):
            raise ValueError("message arrays must have one entry per edge")
        if not self.is_trivial and not (np.all(np.isfinite(eta)) and np.all(np.isfinite(eta_hat))):
            raise ValueError("messages must be finite (use MessageSet.trivial for the tanh=1 solution)")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "eta_hat", eta_hat)

    @classmethod
    def zeros(cls, graph: BipartiteGraph) -> "MessageSet":
        E = graph.num_edges
        return cls(graph, np.zeros(E), np.zeros(E))

    @classmethod
    def from_fields(cls, graph: BipartiteGraph, h_fields) -> "MessageSet":
        """Default initialization: eta copies the local field, eta_hat = 0."""
        h_fields = np.asarray(h_fields, dtype=np.float64)
        return cls(graph, h_fields[graph.edge_var].copy(), np.zeros(graph.num_edges))

    @classmethod
    def trivial(cls, graph: BipartiteGraph) -> "MessageSet":
        E = graph.num_edges
        return cls(graph, np.zeros(E), np.zeros(E), is_trivial=True)

    def eta_at(self, i: int, a: int) -> float:
        return float(self.eta[self.graph.edge_index[(i, a)]])

    def eta_hat_at(self, i: int, a: int) -> float:
        return float(self.eta_hat[self.graph.edge_index[(i, a)]])

    def sup_distance(self, other: "MessageSet") -> float:
        return max(
            float(np.max(np.abs(self.eta - other.eta), initial=0.0)),
            float(np.max(np.abs(self.eta_hat - other.eta_hat), initial=0.0)),
        )


def _padded_check_edges(graph: BipartiteGraph):
    """(m, rmax) edge-id matrix padded with -1, for vectorized cavity products."""
    rmax = graph.max_check_degree
    mat = np.full((graph.m, rmax), -1, dtype=np.int64)
    for a, eids in enumerate(graph.check_edge_ids):
        mat[a, : len(eids)] = eids
    return mat


def _cavity_products(graph: BipartiteGraph, t: np.ndarray) -> np.ndarray:
    """For each edge (i,a): the product of tanh(eta) over N(a) minus i.

    Uses exclusive prefix/suffix products per check row, avoiding division
    so exact zeros propagate correctly.
    """
    if graph.num_edges == 0:
        return np.empty(0)
    mat = _padded_check_edges(graph)
    valid = mat >= 0
    vals = np.where(valid, t[np.where(valid, mat, 0)], 1.0)
    pref = np.ones_like(vals)
    pref[:, 1:] = np.cumprod(vals[:, :-1], axis=1)
    suf = np.ones_like(vals)
    suf[:, :-1] = np.cumprod(vals[:, :0:-1], axis=1)[:, ::-1]
    cav_mat = pref * suf
    out = np.empty(graph.num_edges)
    out[mat[valid]] = cav_mat[valid]
    return out


def bp_update(
    graph: BipartiteGraph,
    h_fields,
    msgs: MessageSet,
    damping: float = 0.0,
) -> MessageSet:
    """One flooding sweep of the BP equations with convex damping.

    Cavity tanh products whose magnitude reaches 1 - 1e-12 are clamped and
    the result is flagged (`clamped=True`): the iterate is drifting toward
    the trivial all-ones solution.
    """
    if msgs.is_trivial:
        return msgs
    if not (0.0 <= damping < 1.0):
        raise ValueError("damping must lie in [0, 1)")
    h_fields = np.asarray(h_fields, dtype=np.float64)
    g = graph
    sum_hat = np.bincount(g.edge_var, weights=msgs.eta_hat, minlength=g.n)
    new_eta = h_fields[g.edge_var] + sum_hat[g.edge_var] - msgs.eta_hat

    cav = _cavity_products(g, np.tanh(msgs.eta))
    limit = 1.0 - TANH_CLAMP
    clamped = bool(np.any(np.abs(cav) >= limit))
    new_hat = np.arctanh(np.clip(cav, -limit, limit))

    new_eta = (1.0 - damping) * new_eta + damping * msgs.eta
    new_hat = (1.0 - damping) * new_hat + damping * msgs.eta_hat
    return MessageSet(g, new_eta, new_hat, clamped=clamped)


@dataclass(frozen=True)
class BPResult:
    messages: MessageSet
    iterations: int
    converged: bool


def bp_solve(
    graph: BipartiteGraph,
    h_fields,
    *,
    damping: float = DEFAULT_DAMPING,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    init: MessageSet | None = None,
) -> BPResult:
    """Iterate bp_update to a fixed point from the local-field initialization.

    Starts at eta = h_i, eta_hat = 0 (which stays in the small-message
    basin for small fields) and stops when the sup-norm change of one sweep
    drops below tol.  Non-convergence is reported in the result, not raised.
    """
    msgs = MessageSet.from_fields(graph, h_fields) if init is None else init
    for it in range(1, max_iter + 1):
        new = bp_update(graph, h_fields, msgs, damping=damping)
        delta = new.sup_distance(msgs)
        msgs = new
        if delta < tol:
            return BPResult(msgs, it, True)
    return BPResult(msgs, max_iter, False)


def update_residual(graph: BipartiteGraph, h_fields, msgs: MessageSet) -> float:
    """Sup-norm distance between msgs and one undamped sweep of msgs."""
    return bp_update(graph, h_fields, msgs, damping=0.0).sup_distance(msgs)


def check_high_noise(msgs: MessageSet, h: float, l: int, r: int, slack: float = 2.0) -> bool:
    """Test the small-field magnitude bounds that single out high-noise solutions.

    Requires |eta| <= h + (l-1) h^(r-1) + slack*h^r and
    |eta_hat| <= h^(r-1) + slack*h^r on every edge; the trivial sentinel
    never qualifies.
    """
    if h < 0:
        raise ValueError("h must be nonnegative")
    if msgs.is_trivial:
        return False
    eta_bound = h + (l - 1) * h ** (r - 1) + slack * h**r
    hat_bound = h ** (r - 1) + slack * h**r
    return bool(
        np.all(np.abs(msgs.eta) <= eta_bound) and np.all(np.abs(msgs.eta_hat) <= hat_bound)
    )
