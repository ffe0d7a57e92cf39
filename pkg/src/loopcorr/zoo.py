"""Small deterministic graphs used as oracles and controls.

All builders keep check degrees >= 2 so BP messages stay finite (a
degree-1 parity check pins its variable and sends an infinite message).
"""

from __future__ import annotations

import numpy as np

from .tanner import BipartiteGraph, TannerGraph


def triple_check_graph() -> TannerGraph:
    """Three identical checks, each adjacent to all six variables (l=3, r=6)."""
    edges = tuple((i, a) for a in range(3) for i in range(6))
    return TannerGraph(6, 3, edges, l=3, r=6)


def single_check(num_vars: int) -> BipartiteGraph:
    """One parity check over num_vars >= 2 variables (a tree: no loops)."""
    return BipartiteGraph(num_vars, 1, tuple((i, 0) for i in range(num_vars)))


def path_graph(num_checks: int) -> BipartiteGraph:
    """Alternating path v0 - c0 - v1 - c1 - ... (a tree; checks have degree 2)."""
    edges = []
    for a in range(num_checks):
        edges.append((a, a))
        edges.append((a + 1, a))
    return BipartiteGraph(num_checks + 1, num_checks, tuple(edges))


def cycle_graph(length: int) -> BipartiteGraph:
    """Alternating cycle with `length` variables and `length` checks."""
    edges = []
    for a in range(length):
        edges.append((a, a))
        edges.append(((a + 1) % length, a))
    return BipartiteGraph(length, length, tuple(edges))


def theta_graph() -> BipartiteGraph:
    """Two variables joined by three length-2 paths (checks of degree 2)."""
    edges = tuple((i, a) for a in range(3) for i in (0, 1))
    return BipartiteGraph(2, 3, edges)


def complete_bipartite(num_vars: int, num_checks: int) -> BipartiteGraph:
    """Every variable adjacent to every check."""
    edges = tuple((i, a) for i in range(num_vars) for a in range(num_checks))
    return BipartiteGraph(num_vars, num_checks, edges)


def disjoint_union(g1: BipartiteGraph, g2: BipartiteGraph) -> BipartiteGraph:
    """Node-disjoint union, g2's labels shifted past g1's."""
    edges = list(g1.edges) + [(i + g1.n, a + g1.m) for i, a in g2.edges]
    return BipartiteGraph(g1.n + g2.n, g1.m + g2.m, tuple(edges))


def cycle_with_tail() -> BipartiteGraph:
    """A 4-cycle with a pendant path hanging off one variable."""
    edges = [(0, 0), (1, 0), (0, 1), (1, 1), (1, 2), (2, 2)]
    return BipartiteGraph(3, 3, tuple(edges))


def bowtie_graph() -> BipartiteGraph:
    """Two 4-cycles sharing one variable."""
    edges = [(0, 0), (1, 0), (0, 1), (1, 1), (1, 2), (2, 2), (1, 3), (2, 3)]
    return BipartiteGraph(3, 4, tuple(edges))


def oracle_suite() -> list:
    """Named small graphs exercising trees, cycles, and dense corners."""
    return [
        ("single_check_2", single_check(2)),
        ("single_check_3", single_check(3)),
        ("path_2", path_graph(2)),
        ("path_4", path_graph(4)),
        ("cycle_2", cycle_graph(2)),
        ("cycle_3", cycle_graph(3)),
        ("cycle_4", cycle_graph(4)),
        ("theta", theta_graph()),
        ("two_cycles", disjoint_union(cycle_graph(2), cycle_graph(3))),
        ("cycle_with_tail", cycle_with_tail()),
        ("bowtie", bowtie_graph()),
        ("k33", complete_bipartite(3, 3)),
    ]


def oracle_identity_cases() -> list:
    """(name, graph, sign vector) triples on which BP reaches a finite
    fixed point for small nonzero fields.

    Variables of degree 2 chain messages around cycles, so the signed
    field sum along every cycle must vanish for the log-domain messages to
    stay bounded; trees and degree->=3 variables have no such constraint.
    The sign vectors below balance every cycle.
    """
    cases = [
        ("single_check_2", single_check(2), [1, 1]),
        ("single_check_3", single_check(3), [1, 1, 1]),
        ("single_check_4", single_check(4), [1, -1, 1, 1]),
        ("path_2", path_graph(2), [1, 1, 1]),
        ("path_4", path_graph(4), [1, -1, 1, 1, -1]),
        ("cycle_2", cycle_graph(2), [1, -1]),
        ("cycle_4", cycle_graph(4), [1, -1, 1, -1]),
        ("cycle_6", cycle_graph(6), [1, -1, 1, -1, 1, -1]),
        ("theta", theta_graph(), [1, -1]),
        ("two_even_cycles", disjoint_union(cycle_graph(2), cycle_graph(4)),
         [1, -1, 1, -1, 1, -1]),
        ("k33", complete_bipartite(3, 3), [1, 1, 1]),
        ("k43", complete_bipartite(4, 3), [1, 1, 1, 1]),
    ]
    return [(name, g, np.asarray(signs, dtype=float)) for name, g, signs in cases]
