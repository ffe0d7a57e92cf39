import itertools
import math

import numpy as np
import pytest

from loopcorr import (
    BoundConstants,
    GeneralizedLoop,
    MessageSet,
    Polymer,
    activity_bound,
    bp_solve,
    brydges_criterion,
    check_polymer_bound,
    decompose,
    enumerate_small_polymers,
    exponent_c,
    generate_regular,
    mayer_truncated,
    polymer_type,
    small_polymer_partition,
    type_census,
    zoo,
)
from loopcorr.errors import InfeasibleParameters
from loopcorr.loops import activity_context, enumerate_generalized_loops, loop_masks, loop_weight_array
from loopcorr.polymer import (
    PolymerType,
    _connected_subsets,
    connected_labeled_graphs,
    in_delta_domain,
    polymer_weight,
    polymers_below,
)


class TestDecompose:
    def test_two_disjoint_cycles(self):
        g = zoo.disjoint_union(zoo.cycle_graph(2), zoo.cycle_graph(3))
        full = GeneralizedLoop.from_edges(g, list(g.edges))
        parts = decompose(full)
        assert len(parts) == 2
        assert sorted(p.size for p in parts) == [4, 6]

    def test_connected_loop_is_single_polymer(self):
        g = zoo.cycle_graph(3)
        full = GeneralizedLoop.from_edges(g, list(g.edges))
        assert len(decompose(full)) == 1

    def test_empty_loop(self):
        g = zoo.cycle_graph(2)
        assert decompose(GeneralizedLoop.empty(g)) == []

    def test_weight_factorizes_over_components(self):
        g = generate_regular(8, 3, 4, seed=0)
        h = np.full(8, 0.06)
        msgs = bp_solve(g, h).messages
        ctx = activity_context(g, h, msgs)
        masks = loop_masks(g)
        weights = loop_weight_array(ctx, masks)
        checked = 0
        for mask, w in zip(masks[1:], weights[1:]):
            loop = GeneralizedLoop.from_mask(g, int(mask))
            parts = decompose(loop)
            if len(parts) < 2:
                continue
            prod = 1.0
            for p in parts:
                prod *= polymer_weight(ctx, p)
            assert prod == pytest.approx(w, rel=1e-12, abs=1e-18)
            checked += 1
            if checked >= 50:
                break
        assert checked >= 10


class TestPolymerType:
    def test_alternating_cycle(self):
        for k in (2, 3, 4):
            g = zoo.cycle_graph(k)
            pt = polymer_type(Polymer.from_edges(g, list(g.edges)))
            assert pt.n_counts[0] == k and pt.m_counts[0] == k
            assert pt.var_edge_total == pt.check_edge_total == 2 * k

    def test_triple_check_full_subgraph(self, triple_check):
        pt = polymer_type(Polymer.from_edges(triple_check, list(triple_check.edges)))
        assert pt.n_counts == (0, 6)  # all six variables at degree 3
        assert pt.m_counts[-1] == 3  # all three checks at degree 6
        assert pt.var_edge_total == pt.check_edge_total == 18

    def test_handshake_on_enumerated_loops(self):
        g = generate_regular(6, 3, 6, seed=1)
        for loop in enumerate_generalized_loops(g):
            if loop.is_empty:
                continue
            pt = polymer_type(loop)
            assert pt.var_edge_total == pt.check_edge_total
            assert pt.size == loop.size


class TestActivityBound:
    def test_alternating_cycle_value(self):
        # (alpha_2 h^4)^3 (1 + beta_2 h^2)^3 at h=0.1, defaults 1.1/1.1/0.9
        g = zoo.cycle_graph(3)
        h = 0.1
        pt = PolymerType(3, 6, (3, 0), (3, 0, 0, 0, 0))
        expected = (1.1 * h**4) ** 3 * (1 + 1.1 * h**2) ** 3
        assert activity_bound(pt, h) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(1.376e-12, rel=1e-3)

    def test_even_only_type_not_small(self):
        # full-degree checks and even-degree variables: bound stays near 1
        pt = PolymerType(3, 6, (4, 0), (0, 0, 0, 0, 2))
        h = 0.05
        val = activity_bound(pt, h)
        assert val >= (1 - 0.9 * 6 * h * h) ** 2

    def test_invalid_at_large_h(self):
        pt = PolymerType(3, 6, (0, 0), (0, 0, 0, 0, 1))
        with pytest.raises(InfeasibleParameters):
            activity_bound(pt, 0.5)  # 0.9 * 6 * 0.25 > 1

    def test_constant_ranges_validated(self):
        with pytest.raises(ValueError):
            BoundConstants(alpha_t=0.9)
        with pytest.raises(ValueError):
            BoundConstants(alpha_r=1.1)

    def test_dominates_enumerated_loops(self):
        g = generate_regular(8, 3, 4, seed=2)
        h = 0.05
        hf = np.full(8, h)
        msgs = bp_solve(g, hf).messages
        ctx = activity_context(g, hf, msgs)
        masks = loop_masks(g)
        weights = loop_weight_array(ctx, masks)
        for mask, w in itertools.islice(zip(masks[1:], weights[1:]), 300):
            pt = polymer_type(GeneralizedLoop.from_mask(g, int(mask)))
            assert abs(w) <= activity_bound(pt, h) * (1 + 1e-12)


class TestExponent:
    def test_reference_value(self):
        assert exponent_c(3, 6, 0.5) == pytest.approx(2.0 / 3.0, abs=1e-15)

    def test_boundary_rejected(self):
        with pytest.raises(InfeasibleParameters):
            exponent_c(3, 6, 4.0 / 9.0)

    def test_monotone_in_kappa(self):
        vals = [exponent_c(3, 6, k) for k in (0.5, 0.55, 0.6)]
        assert vals[0] < vals[1] < vals[2]


class TestSmallPolymerEnumeration:
    def test_matches_connected_loops(self):
        g = generate_regular(6, 3, 6, seed=3)
        via_loops = sorted(
            loop.edge_ids
            for loop in enumerate_generalized_loops(g)
            if not loop.is_empty and loop.is_connected() and loop.size <= 6
        )
        via_subsets = sorted(p.edge_ids for p in enumerate_small_polymers(g, 6))
        assert via_loops == via_subsets

    def test_scales_to_large_graphs(self):
        g = generate_regular(40, 3, 6, seed=4)  # 120 edges, far beyond masks
        polys = enumerate_small_polymers(g, 4)
        assert all(p.size == 4 for p in polys)
        # every size-4 polymer is a 4-cycle: two vars sharing two checks
        nbrs = [set(g.var_neighbors[i]) for i in range(g.n)]
        expected = sum(
            math.comb(len(nbrs[i] & nbrs[j]), 2)
            for i in range(g.n)
            for j in range(i + 1, g.n)
        )
        assert len(polys) == expected

    def test_connected_subset_enumeration_unique(self):
        neighbors = [set() for _ in range(5)]
        for u, v in ((0, 1), (1, 2), (2, 3), (3, 4), (4, 0)):
            neighbors[u].add(v)
            neighbors[v].add(u)
        subs = _connected_subsets(neighbors, 5)
        assert len(subs) == len(set(map(frozenset, subs)))
        # 5-cycle: n subsets of each size 1..4 plus the full set
        from collections import Counter

        sizes = Counter(len(s) for s in subs)
        assert sizes == Counter({1: 5, 2: 5, 3: 5, 4: 5, 5: 1})


class TestPolymerBound:
    def test_alternating_cycle_degree_inequality(self):
        g = generate_regular(12, 3, 6, seed=5)
        polys = [p for p in enumerate_small_polymers(g, 4)]
        assert polys, "needs at least one 4-cycle"
        h = 0.05
        hf = np.full(12, h)
        msgs = bp_solve(g, hf).messages
        c = exponent_c(3, 6, 0.5)
        rep = check_polymer_bound(polys[0], msgs, hf, h, c, 0.5)
        # 4-cycle: m_2 = 2, so sum (r-t) m_t = 8 >= (2/3) * 4
        assert rep.degree_sum == 8
        assert rep.degree_need == pytest.approx(c * 4)
        assert rep.degree_ok and rep.activity_ok

    def test_reports_rather_than_raises_on_non_expander(self):
        g = generate_regular(8, 3, 6, seed=6)  # too small to expand at this size
        polys = enumerate_small_polymers(g, 4)
        h = 0.05
        hf = np.full(8, h)
        msgs = bp_solve(g, hf).messages
        rep = check_polymer_bound(polys[0], msgs, hf, h, 2.0 / 3.0, 0.5)
        assert isinstance(rep.activity_ok, bool)  # no exception either way


class TestBrydges:
    def test_empty_polymer_set_gives_zero(self):
        g = zoo.cycle_graph(2)
        h = np.full(2, 0.05)
        msgs = bp_solve(g, h * np.array([1.0, -1.0])).messages
        assert brydges_criterion(g, msgs, h * np.array([1.0, -1.0]), lam=0.5) == 0.0

    def test_linear_in_zeta0(self):
        g = generate_regular(8, 3, 6, seed=7)
        h = np.full(8, 0.05)
        msgs = bp_solve(g, h).messages
        q1 = brydges_criterion(g, msgs, h, 0.75, zeta0=1.0)
        q2 = brydges_criterion(g, msgs, h, 0.75, zeta0=2.0)
        assert q2 == pytest.approx(2 * q1, rel=1e-12)


class TestPartitionSplit:
    def test_lambda_below_smallest_polymer(self):
        g = generate_regular(8, 3, 6, seed=8)
        h = np.full(8, 0.05)
        msgs = bp_solve(g, h).messages
        split = small_polymer_partition(g, msgs, h, lam=3 / 8)
        assert split.z_small == pytest.approx(1.0, abs=1e-15)

    def test_lambda_above_largest_polymer(self):
        g = zoo.cycle_graph(3)  # single polymer of size 6
        signs = np.array([1.0, -1.0, 1.0]) * 0.0
        msgs = MessageSet.zeros(g)
        split = small_polymer_partition(g, msgs, signs, lam=1.2)
        assert split.remainder == pytest.approx(0.0, abs=1e-15)
        assert split.z_small == pytest.approx(split.loop_total, abs=1e-15)

    def test_dual_methods_agree(self):
        for seed in (9, 10):
            g = generate_regular(8, 3, 4, seed=seed)
            h = np.full(8, 0.05)
            msgs = bp_solve(g, h).messages
            split = small_polymer_partition(g, msgs, h, lam=0.75)
            assert split.z_small_by_loops == pytest.approx(
                split.z_small_by_families, rel=1e-12
            )
            assert split.remainder_by_difference == pytest.approx(
                split.remainder_direct, rel=1e-9, abs=1e-12
            )

    def test_total_decomposes(self):
        g = generate_regular(8, 3, 6, seed=11)
        h = np.full(8, 0.05)
        msgs = bp_solve(g, h).messages
        split = small_polymer_partition(g, msgs, h, lam=0.75)
        assert split.loop_total == pytest.approx(
            split.z_small + split.remainder, rel=1e-12
        )


class TestMayer:
    def test_connected_graph_counts(self):
        assert len(connected_labeled_graphs(1)) == 1
        assert len(connected_labeled_graphs(2)) == 1
        assert len(connected_labeled_graphs(3)) == 4
        assert len(connected_labeled_graphs(4)) == 38

    def test_first_order_is_activity_sum(self):
        g = generate_regular(8, 3, 6, seed=12)
        h = np.full(8, 0.3)
        msgs = bp_solve(g, h).messages
        lam = 5 / 8
        polys = polymers_below(g, lam)
        ctx = activity_context(g, h, msgs)
        s = mayer_truncated(g, msgs, h, lam, max_order=1, polymers=polys)
        expected = sum(polymer_weight(ctx, p) for p in polys) / g.n
        assert s[0] == pytest.approx(expected, rel=1e-12)

    def test_partial_sums_approach_log_zp(self):
        g = generate_regular(8, 3, 6, seed=12)
        h = np.full(8, 0.4)
        msgs = bp_solve(g, h).messages
        lam = 5 / 8
        q = brydges_criterion(g, msgs, h, lam)
        assert q < 1.0
        split = small_polymer_partition(g, msgs, h, lam)
        target = math.log(split.z_small) / g.n
        sums = mayer_truncated(g, msgs, h, lam, max_order=4)
        errs = [abs(s - target) for s in sums]
        assert all(b <= a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 1e-9


class TestTypeCensus:
    def test_counts_partition_nonempty_loops(self):
        g = generate_regular(6, 3, 6, seed=13)
        rep = type_census(g)
        assert sum(rep.counts.values()) == loop_masks(g).shape[0] - 1

    def test_triple_check_against_python_filter(self, triple_check):
        rep = type_census(triple_check)
        # brute-force oracle over all 2^18 subsets
        from collections import Counter

        oracle = Counter()
        for loop in enumerate_generalized_loops(triple_check, method="brute"):
            if loop.is_empty:
                continue
            oracle[polymer_type(loop)] += 1
        assert rep.counts == dict(oracle)

    def test_types_satisfy_handshake(self):
        g = generate_regular(8, 3, 4, seed=14)
        rep = type_census(g)
        for pt in rep.counts:
            assert pt.var_edge_total == pt.check_edge_total

    def test_markov_upper_bounds_remainder(self):
        g = generate_regular(8, 3, 6, seed=15)
        h = 0.05
        hf = np.full(8, h)
        msgs = bp_solve(g, hf).messages
        lam = 0.75
        split = small_polymer_partition(g, msgs, hf, lam)
        # |R| <= sum over large-component loops of Kbar(type)
        masks = loop_masks(g)
        from loopcorr import _kernels

        small = _kernels.component_all_small(
            np.asarray(masks, dtype=np.uint64), g.edge_var, g.edge_check, g.n, g.m, lam * g.n
        )
        big_bound = 0.0
        for mask in masks[~small]:
            pt = polymer_type(GeneralizedLoop.from_mask(g, int(mask)))
            big_bound += activity_bound(pt, h)
        assert abs(split.remainder) <= big_bound * (1 + 1e-12)

    def test_delta_domain_membership(self):
        pt = PolymerType(3, 6, (2, 0), (2, 0, 0, 0, 0))
        assert in_delta_domain(pt, lam=0.5, n=8, m=4)
        assert not in_delta_domain(pt, lam=0.6, n=8, m=4)
