"""Polymers (connected loops), their types, activity bounds, and the
cluster expansion of the small-polymer partition function.

A polymer is a connected generalized loop; every loop decomposes uniquely
into node-disjoint polymers and its activity factorizes over them.  Small
polymers (fewer than lambda*n touched nodes) define a partition function
Z_p whose logarithm admits the Mayer expansion in powers of the
activities; the summability functional Q < 1 guarantees its absolute
convergence.  Everything here is evaluated exactly on concrete graphs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .bp import MessageSet
from .errors import CapExceeded, InfeasibleParameters
from .loops import (
    ActivityContext,
    GeneralizedLoop,
    activity_context,
    loop_masks,
    loop_weight_array,
)
from .tanner import BipartiteGraph, TannerGraph, admissible_kappa_interval

MAYER_MAX_ORDER = 5
POLYMER_EDGE_SUBSET_CAP = 1 << 20
FAMILY_POLYMER_CAP = 4096


class Polymer(GeneralizedLoop):
    """A connected generalized loop; the unit of the cluster expansion."""

    def __post_init__(self):
        super().__post_init__()
        if not self.edge_ids:
            raise ValueError("a polymer is nonempty")
        if not self.is_connected():
            raise ValueError("polymer edge set is disconnected")


def decompose(loop: GeneralizedLoop) -> list:
    """Connected components of a loop, as polymers; empty loop -> []."""
    g = loop.graph
    remaining = set(loop.edge_ids)
    by_node: dict = {}
    for e in loop.edge_ids:
        i, a = g.edges[e]
        by_node.setdefault(("v", i), []).append(e)
        by_node.setdefault(("c", a), []).append(e)
    out = []
    while remaining:
        seed = min(remaining)
        comp = {seed}
        remaining.discard(seed)
        frontier = [seed]
        while frontier:
            e = frontier.pop()
            i, a = g.edges[e]
            for e2 in by_node[("v", i)] + by_node[("c", a)]:
                if e2 in remaining:
                    remaining.discard(e2)
                    comp.add(e2)
                    frontier.append(e2)
        out.append(Polymer(g, tuple(sorted(comp))))
    return sorted(out, key=lambda p: p.edge_ids)


@dataclass(frozen=True)
class PolymerType:
    """Induced-degree census (n_s)_{s=2..l}, (m_t)_{t=2..r} of a subgraph."""

    l: int
    r: int
    n_counts: tuple  # n_s for s = 2..l
    m_counts: tuple  # m_t for t = 2..r

    def __post_init__(self):
        if len(self.n_counts) != self.l - 1 or len(self.m_counts) != self.r - 1:
            raise ValueError("count vectors must cover degrees 2..l and 2..r")

    @property
    def size(self) -> int:
        return sum(self.n_counts) + sum(self.m_counts)

    @property
    def num_vars(self) -> int:
        return sum(self.n_counts)

    @property
    def num_checks(self) -> int:
        return sum(self.m_counts)

    @property
    def var_edge_total(self) -> int:
        return sum(s * ns for s, ns in enumerate(self.n_counts, start=2))

    @property
    def check_edge_total(self) -> int:
        return sum(t * mt for t, mt in enumerate(self.m_counts, start=2))

    def key(self) -> str:
        """Render as "n2,...,nl|m2,...,mr" for JSON census maps."""
        return ",".join(map(str, self.n_counts)) + "|" + ",".join(map(str, self.m_counts))


def polymer_type(loop: GeneralizedLoop) -> PolymerType:
    """Degree census of a loop or polymer.

    Uses the graph's (l, r) when biregular, else its maximum degrees; the
    handshake identity sum_s s*n_s = sum_t t*m_t holds by construction.
    """
    g = loop.graph
    l = g.l if isinstance(g, TannerGraph) else max(g.max_var_degree, 2)
    r = g.r if isinstance(g, TannerGraph) else max(g.max_check_degree, 2)
    n_counts = [0] * (l - 1)
    m_counts = [0] * (r - 1)
    for d in loop.var_degrees.values():
        n_counts[d - 2] += 1
    for d in loop.check_degrees.values():
        m_counts[d - 2] += 1
    return PolymerType(l, r, tuple(n_counts), tuple(m_counts))


@dataclass(frozen=True)
class BoundConstants:
    """Slack constants of the activity upper bound.

    alpha_t (t < r) and beta_s multiply the h-power factors and must
    exceed 1; alpha_r in (0, 1) scales the full-degree check factor.
    Scalars apply uniformly; per-degree overrides go in the dicts.
    """

    alpha_t: float = 1.1
    alpha_r: float = 0.9
    beta_s: float = 1.1
    alpha_overrides: dict = field(default_factory=dict)
    beta_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.alpha_t > 1.0:
            raise ValueError("alpha_t must exceed 1")
        if not (0.0 < self.alpha_r < 1.0):
            raise ValueError("alpha_r must lie in (0, 1)")
        if not self.beta_s > 1.0:
            raise ValueError("beta_s must exceed 1")
        for t, v in self.alpha_overrides.items():
            if not v > 1.0:
                raise ValueError(f"alpha override at t={t} must exceed 1")
        for s, v in self.beta_overrides.items():
            if not v > 1.0:
                raise ValueError(f"beta override at s={s} must exceed 1")

    def alpha(self, t: int) -> float:
        return self.alpha_overrides.get(t, self.alpha_t)

    def beta(self, s: int) -> float:
        return self.beta_overrides.get(s, self.beta_s)


def activity_bound(ptype: PolymerType, h: float, consts: BoundConstants | None = None) -> float:
    """Type-level upper bound on |K|:

        Kbar = (1 - alpha_r r h^2)^{m_r}
               * prod_{t=2}^{r-1} (alpha_t h^{r-t})^{m_t}
               * prod_{s even}    (1 + beta_s s (s-1) h^2 / 2)^{n_s}
               * prod_{s odd>=3}  (beta_s (s-1) h)^{n_s}

    Sharp to leading order in h, factor by factor.

    Raises:
        InfeasibleParameters: alpha_r * r * h^2 >= 1 (the full-degree
            factor would go nonpositive; the bound is invalid at this h).
    """
    if h < 0:
        raise ValueError("h must be nonnegative")
    consts = consts or BoundConstants()
    r = ptype.r
    lead = 1.0 - consts.alpha_r * r * h * h
    if lead <= 0.0:
        raise InfeasibleParameters(
            f"alpha_r * r * h^2 = {consts.alpha_r * r * h * h:.6g} >= 1: bound invalid at h={h}"
        )
    out = lead ** ptype.m_counts[r - 2]
    for t in range(2, r):
        mt = ptype.m_counts[t - 2]
        if mt:
            out *= (consts.alpha(t) * h ** (r - t)) ** mt
    for s in range(2, ptype.l + 1):
        ns = ptype.n_counts[s - 2]
        if not ns:
            continue
        if s % 2 == 0:
            out *= (1.0 + 0.5 * consts.beta(s) * s * (s - 1) * h * h) ** ns
        else:
            out *= (consts.beta(s) * (s - 1) * h) ** ns
    return out


def exponent_c(l: int, r: int, kappa: float) -> float:
    """Decay exponent c = r - (2+r) / (3 - l(1-kappa)) of the polymer bound.

    Requires 3 - l(1-kappa) > 0 and c > 0, which together pin kappa to the
    admissible interval (1 - 2(r-1)/(lr), 1 - 1/l).
    """
    lo, hi = admissible_kappa_interval(l, r)
    denom = 3.0 - l * (1.0 - kappa)
    if denom <= 0.0 or not (lo < kappa < hi):
        raise InfeasibleParameters(
            f"kappa={kappa:.6g} outside admissible interval ({lo:.6g}, {hi:.6g})"
        )
    c = r - (2.0 + r) / denom
    if c <= 0.0:
        raise InfeasibleParameters(f"exponent c={c:.6g} is nonpositive at kappa={kappa:.6g}")
    return c


# -- bounded polymer enumeration --------------------------------------------


def _connected_subsets(neighbors, max_size: int):
    """Every connected vertex subset of size <= max_size, exactly once.

    Extension-set enumeration: a subset is grown from its minimum vertex
    using only larger vertices, and a vertex may enter the extension set
    only when it is not adjacent to any earlier subset vertex, so each
    connected set appears at exactly one node of the recursion tree.
    """
    out = []

    def extend(sub, ext, root, nbr_sub):
        out.append(tuple(sub))
        if len(sub) == max_size:
            return
        ext = list(ext)
        while ext:
            w = ext.pop()
            excl = [u for u in neighbors[w] if u > root and u not in nbr_sub and u not in sub]
            extend(sub + [w], ext + excl, root, nbr_sub | neighbors[w])

    for v in range(len(neighbors)):
        extend([v], [u for u in neighbors[v] if u > v], v, set(neighbors[v]))
    return out


def enumerate_small_polymers(
    g: BipartiteGraph, max_nodes: int, edge_subset_cap: int = POLYMER_EDGE_SUBSET_CAP
) -> list:
    """All polymers touching at most max_nodes nodes, each exactly once.

    Walks connected node subsets of the graph (variables and checks
    together) and, per subset, filters the edge subsets lying inside it
    for full minimum degree 2 and connectivity.  Scales to graphs far too
    large for full loop enumeration as long as max_nodes stays small.
    """
    if max_nodes < 2:
        return []
    nv, nm = g.n, g.m
    total = nv + nm
    neighbors = [set() for _ in range(total)]
    for i, a in g.edges:
        neighbors[i].add(nv + a)
        neighbors[nv + a].add(i)
    out = []
    for sub in _connected_subsets(neighbors, max_nodes):
        if len(sub) < 2:
            continue
        nodes = set(sub)
        inner = [
            k for k, (i, a) in enumerate(g.edges) if i in nodes and (nv + a) in nodes
        ]
        # every node needs >= 2 incident inner edges to reach degree 2
        degs = {v: 0 for v in sub}
        for k in inner:
            i, a = g.edges[k]
            degs[i] += 1
            degs[nv + a] += 1
        if any(d < 2 for d in degs.values()):
            continue
        if 1 << len(inner) > edge_subset_cap:
            raise CapExceeded(
                f"node subset with {len(inner)} inner edges exceeds the edge-subset cap"
            )
        for keep in itertools.product((False, True), repeat=len(inner)):
            eids = tuple(k for k, flag in zip(inner, keep) if flag)
            if len(eids) < len(sub):  # connected spanning needs >= |T| edges (cycle-like)
                continue
            d = {v: 0 for v in sub}
            for k in eids:
                i, a = g.edges[k]
                d[i] += 1
                d[nv + a] += 1
            if any(x < 2 for x in d.values()):
                continue
            if not _edges_connected(g, eids):
                continue
            out.append(Polymer(g, eids))
    return sorted(out, key=lambda p: p.edge_ids)


def _edges_connected(g: BipartiteGraph, eids) -> bool:
    if not eids:
        return False
    eset = set(eids)
    by_node: dict = {}
    for e in eids:
        i, a = g.edges[e]
        by_node.setdefault(("v", i), []).append(e)
        by_node.setdefault(("c", a), []).append(e)
    seed = next(iter(eset))
    seen = {seed}
    frontier = [seed]
    while frontier:
        e = frontier.pop()
        i, a = g.edges[e]
        for e2 in by_node[("v", i)] + by_node[("c", a)]:
            if e2 not in seen:
                seen.add(e2)
                frontier.append(e2)
    return len(seen) == len(eset)


def polymers_below(g: BipartiteGraph, lam: float) -> list:
    """All polymers with fewer than lam*n touched nodes."""
    lam_n = lam * g.n
    cap = int(math.ceil(lam_n)) - 1 if lam_n == int(lam_n) else int(lam_n)
    return [p for p in enumerate_small_polymers(g, max(cap, 0)) if p.size < lam_n]


def polymer_weight(ctx: ActivityContext, loop: GeneralizedLoop) -> float:
    """K of a single loop/polymer from precomputed tables (no mask limit)."""
    g = ctx.graph
    w = 1.0
    for i, d in sorted(loop.var_degrees.items()):
        w *= ctx.ki_table[i, d]
    in_loop = set(loop.edge_ids)
    for a, d in sorted(loop.check_degrees.items()):
        w *= ctx.ratio_table[a, d]
        for e in g.check_edge_ids[a]:
            w *= ctx.s_in[e] if e in in_loop else ctx.t[e]
    return float(w)


# -- polymer bound reports ---------------------------------------------------


@dataclass(frozen=True)
class PolymerBoundReport:
    """Numeric verdicts for one polymer on one (expander) graph."""

    size: int
    activity: float
    activity_bound: float  # h^{c |gamma| / 2}
    activity_ok: bool
    degree_sum: int  # sum_{t<r} (r-t) m_t
    degree_need: float  # c |gamma|
    degree_ok: bool
    boundary_actual: int  # |d(V)| in the host graph
    boundary_lower: float  # kappa l |V|
    boundary_upper: int  # sum_t m_t + sum_s (l-s) n_s
    boundary_ok: bool


def check_polymer_bound(
    polymer: Polymer,
    msgs: MessageSet,
    h_fields,
    h: float,
    c: float,
    kappa: float,
) -> PolymerBoundReport:
    """Evaluate the small-polymer activity bound |K| <= h^{c|gamma|/2},
    the degree inequality sum_{t<r} (r-t) m_t >= c |gamma|, and the
    expansion sandwich kappa l |V| <= |d(V)| <= sum m_t + sum (l-s) n_s
    for the polymer's variable set.  Violations are reported, not raised.
    """
    g = polymer.graph
    if not isinstance(g, TannerGraph):
        raise InfeasibleParameters("polymer bounds need a biregular host graph")
    ctx = activity_context(g, h_fields, msgs)
    k_val = polymer_weight(ctx, polymer)
    ptype = polymer_type(polymer)
    size = polymer.size
    rhs = h ** (0.5 * c * size)
    deg_sum = sum((g.r - t) * mt for t, mt in enumerate(ptype.m_counts, start=2) if t < g.r)
    deg_need = c * size
    vars_in = polymer.touched_vars
    boundary = set()
    for i in vars_in:
        boundary.update(g.var_neighbors[i])
    b_lower = kappa * g.l * len(vars_in)
    b_upper = ptype.num_checks + sum(
        (g.l - s) * ns for s, ns in enumerate(ptype.n_counts, start=2)
    )
    tol = 1e-12
    return PolymerBoundReport(
        size=size,
        activity=k_val,
        activity_bound=rhs,
        activity_ok=abs(k_val) <= rhs * (1.0 + tol),
        degree_sum=deg_sum,
        degree_need=deg_need,
        degree_ok=deg_sum + tol >= deg_need,
        boundary_actual=len(boundary),
        boundary_lower=b_lower,
        boundary_upper=b_upper,
        boundary_ok=b_lower - tol <= len(boundary) <= b_upper + tol,
    )


# -- convergence criterion and partition functions ---------------------------


def brydges_criterion(
    g: BipartiteGraph,
    msgs: MessageSet,
    h_fields,
    lam: float,
    zeta0: float = 2.0,
    polymers: list | None = None,
) -> float:
    """Summability functional of the cluster expansion:

        Q = max over nodes z of sum_{polymers through z, size < lam n}
            e^{size} * zeta0 * |K(polymer)|

    (the factorial tail sum_t size^t / t! evaluated in closed form as
    e^{size}).  Q < 1 certifies absolute convergence of the Mayer series.
    """
    if polymers is None:
        polymers = polymers_below(g, lam)
    ctx = activity_context(g, h_fields, msgs)
    per_node: dict = {}
    for p in polymers:
        contrib = math.exp(p.size) * zeta0 * abs(polymer_weight(ctx, p))
        for i in p.touched_vars:
            per_node[("v", i)] = per_node.get(("v", i), 0.0) + contrib
        for a in p.touched_checks:
            per_node[("c", a)] = per_node.get(("c", a), 0.0) + contrib
    return max(per_node.values()) if per_node else 0.0


@dataclass(frozen=True)
class PartitionSplit:
    """Z_p and the large-polymer remainder, each computed two ways."""

    z_small_by_loops: float
    z_small_by_families: float
    remainder_by_difference: float
    remainder_direct: float
    loop_total: float

    @property
    def z_small(self) -> float:
        return self.z_small_by_loops

    @property
    def remainder(self) -> float:
        return self.remainder_by_difference


def _family_sum(polymers, weights, node_masks) -> float:
    """Sum over unordered families of pairwise node-disjoint polymers of
    the product of their activities (empty family contributes 1)."""
    if len(polymers) > FAMILY_POLYMER_CAP:
        raise CapExceeded(f"{len(polymers)} small polymers exceed the family-sum cap")
    P = len(polymers)

    def rec(i: int, used: int) -> float:
        total = 1.0  # close the family here
        for j in range(i, P):
            if node_masks[j] & used == 0:
                total += weights[j] * rec(j + 1, used | node_masks[j])
        return total

    return rec(0, 0)


def small_polymer_partition(
    g: BipartiteGraph,
    msgs: MessageSet,
    h_fields,
    lam: float,
    method: str = "auto",
    consistency_tol: float = 1e-10,
) -> PartitionSplit:
    """Z_p, the loop series restricted to small polymers, computed two ways.

    (a) the sum of K(g) over generalized loops all of whose connected
    components have fewer than lam*n nodes, and (b) the sum over unordered
    families of pairwise node-disjoint small polymers of the product of
    activities.  Disagreement beyond `consistency_tol` (relative) raises.
    Also returns the large-polymer remainder R, both as total - Z_p and as
    the direct sum over loops containing a large component.
    """
    lam_n = lam * g.n
    masks = loop_masks(g, method=method)
    ctx = activity_context(g, h_fields, msgs)
    weights = loop_weight_array(ctx, masks)
    small = _kernels.component_all_small(
        np.asarray(masks, dtype=np.uint64), g.edge_var, g.edge_check, g.n, g.m, float(lam_n)
    )
    z_small_loops = float(weights[small].sum())
    total = float(weights.sum())
    r_direct = float(weights[~small].sum())

    polys = polymers_below(g, lam)
    nv = g.n
    node_masks = []
    wvals = []
    for p in polys:
        mask = 0
        for i in p.touched_vars:
            mask |= 1 << i
        for a in p.touched_checks:
            mask |= 1 << (nv + a)
        node_masks.append(mask)
        wvals.append(polymer_weight(ctx, p))
    z_small_families = _family_sum(polys, wvals, node_masks)

    scale = max(abs(z_small_loops), abs(z_small_families), 1.0)
    if abs(z_small_loops - z_small_families) > consistency_tol * scale:
        raise AssertionError(
            f"Z_p dual computation disagrees: loops={z_small_loops!r} "
            f"families={z_small_families!r}"
        )
    return PartitionSplit(
        z_small_by_loops=z_small_loops,
        z_small_by_families=z_small_families,
        remainder_by_difference=total - z_small_loops,
        remainder_direct=r_direct,
        loop_total=total,
    )


def large_polymer_remainder(
    g: BipartiteGraph, msgs: MessageSet, h_fields, lam: float, method: str = "auto"
) -> PartitionSplit:
    """Alias view of small_polymer_partition; R = loop total - Z_p."""
    return small_polymer_partition(g, msgs, h_fields, lam, method=method)


# -- Mayer (cluster) expansion ------------------------------------------------


MAYER_POLYMER_CAP = 512


@lru_cache(maxsize=None)
def connected_labeled_graphs(num_vertices: int):
    """All connected labeled simple graphs on the given vertices.

    Returns tuples (edge_mask, parity) where bit p of edge_mask marks the
    p-th vertex pair in lexicographic order and parity = (-1)^#edges.
    """
    pairs = list(itertools.combinations(range(num_vertices), 2))
    out = []
    for emask in range(1 << len(pairs)):
        nbrs = [set() for _ in range(num_vertices)]
        for p, (u, v) in enumerate(pairs):
            if emask >> p & 1:
                nbrs[u].add(v)
                nbrs[v].add(u)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in nbrs[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) == num_vertices:
            out.append((emask, -1.0 if bin(emask).count("1") % 2 else 1.0))
    return tuple(out)


def _ursell(overlap_mask: int, num_vertices: int) -> float:
    """Sum over connected spanning subgraphs of (-1)^#edges.

    Zero whenever the overlap graph itself is disconnected, which prunes
    non-contributing polymer tuples.
    """
    total = 0.0
    for emask, parity in connected_labeled_graphs(num_vertices):
        if emask & ~overlap_mask == 0:
            total += parity
    return total


def mayer_truncated(
    g: BipartiteGraph,
    msgs: MessageSet,
    h_fields,
    lam: float,
    max_order: int = 4,
    polymers: list | None = None,
) -> list:
    """Partial sums S_1..S_max of the cluster expansion of (1/n) ln Z_p.

    Order M collects tuples of M small polymers whose overlap graph is
    connected, weighted by the product of activities and the signed count
    of connected interaction graphs (repeated polymers always overlap).

    Returns the running partial sums [S_1, ..., S_max].
    """
    if not (1 <= max_order <= MAYER_MAX_ORDER):
        raise ValueError(f"max_order must lie in 1..{MAYER_MAX_ORDER}")
    if polymers is None:
        polymers = polymers_below(g, lam)
    if len(polymers) > MAYER_POLYMER_CAP:
        raise CapExceeded(f"{len(polymers)} small polymers exceed the cluster-sum cap")
    ctx = activity_context(g, h_fields, msgs)
    weights = [polymer_weight(ctx, p) for p in polymers]
    node_sets = [set(("v", i) for i in p.touched_vars) | set(("c", a) for a in p.touched_checks)
                 for p in polymers]
    P = len(polymers)
    overlap = [set() for _ in range(P)]
    for i in range(P):
        for j in range(i + 1, P):
            if node_sets[i] & node_sets[j]:
                overlap[i].add(j)
                overlap[j].add(i)

    buckets = [0.0] * (max_order + 1)
    for support in _connected_subsets(overlap, max_order):
        q = len(support)
        base_adj = [
            [p1 in overlap[p2] for p1 in support] for p2 in support
        ]
        kprod_base = [weights[p] for p in support]
        # multiplicities >= 1 per support polymer, total <= max_order
        for mult in itertools.product(range(1, max_order + 1), repeat=q):
            order = sum(mult)
            if order > max_order:
                continue
            # overlap mask on `order` labeled copies
            labels = []
            for pos, p in enumerate(support):
                labels.extend([pos] * mult[pos])
            pairs = list(itertools.combinations(range(order), 2))
            omask = 0
            for pidx, (u, v) in enumerate(pairs):
                if labels[u] == labels[v] or base_adj[labels[u]][labels[v]]:
                    omask |= 1 << pidx
            phi = _ursell(omask, order)
            if phi == 0.0:
                continue
            term = phi
            for pos in range(q):
                term *= kprod_base[pos] ** mult[pos] / math.factorial(mult[pos])
            buckets[order] += term
    partial = []
    acc = 0.0
    for order in range(1, max_order + 1):
        acc += buckets[order]
        partial.append(acc / g.n)
    return partial


# -- type census --------------------------------------------------------------


@dataclass(frozen=True)
class CensusReport:
    counts: dict  # PolymerType -> count over nonempty loops
    delta_counts: dict | None  # restricted to the large-type domain
    markov_rhs: float | None  # sum over delta of Kbar * count


def in_delta_domain(ptype: PolymerType, lam: float, n: int, m: int) -> bool:
    """Membership in the large-type domain: total size >= lam*n, the
    handshake identity, and strictly fewer nodes than the host graph."""
    return (
        ptype.size >= lam * n
        and ptype.var_edge_total == ptype.check_edge_total
        and ptype.num_vars < n
        and ptype.num_checks < m
    )


def type_census(
    g: BipartiteGraph,
    lam: float | None = None,
    h: float | None = None,
    consts: BoundConstants | None = None,
    method: str = "auto",
) -> CensusReport:
    """Exact count of nonempty generalized loops per degree type.

    With `lam` given, also restricts to the large-type domain and, with
    `h`, evaluates the union-bound right-hand side sum_types Kbar * count.
    """
    masks = loop_masks(g, method=method)
    masks = masks[masks != 0]
    l = g.l if isinstance(g, TannerGraph) else max(g.max_var_degree, 2)
    r = g.r if isinstance(g, TannerGraph) else max(g.max_check_degree, 2)
    tc = _kernels.loop_type_counts(
        np.asarray(masks, dtype=np.uint64), g.edge_var, g.edge_check, g.n, g.m, l, r
    )
    uniq, cnt = np.unique(tc, axis=0, return_counts=True)
    counts = {}
    for row, c in zip(uniq, cnt):
        pt = PolymerType(l, r, tuple(int(x) for x in row[: l - 1]), tuple(int(x) for x in row[l - 1 :]))
        counts[pt] = int(c)
    delta_counts = None
    markov = None
    if lam is not None:
        delta_counts = {
            pt: c for pt, c in counts.items() if in_delta_domain(pt, lam, g.n, g.m)
        }
        if h is not None:
            markov = sum(
                activity_bound(pt, h, consts) * c for pt, c in delta_counts.items()
            )
    return CensusReport(counts=counts, delta_counts=delta_counts, markov_rhs=markov)
