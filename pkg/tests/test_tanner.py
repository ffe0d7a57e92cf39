import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopcorr import (
    BipartiteGraph,
    TannerGraph,
    expansion_threshold,
    generate_regular,
    gf2_nullspace,
    gf2_rank,
    is_expander,
    load_alist,
    parity_check_matrix,
    save_alist,
    zoo,
)
from loopcorr.errors import AlistError, CapExceeded, InfeasibleParameters
from loopcorr.tanner import admissible_kappa_interval, binary_entropy


class TestGenerateRegular:
    def test_dimensions_3_6(self):
        g = generate_regular(6, 3, 6, seed=1)
        assert g.m == 3 and g.num_edges == 18

    def test_dimensions_3_4(self):
        g = generate_regular(8, 3, 4, seed=7)
        assert g.m == 6 and g.num_edges == 24

    def test_infeasible_divisibility(self):
        with pytest.raises(InfeasibleParameters):
            generate_regular(5, 3, 4, seed=0)

    def test_infeasible_check_degree(self):
        with pytest.raises(InfeasibleParameters):
            generate_regular(4, 3, 6, seed=0)

    def test_same_seed_same_graph(self):
        a = generate_regular(8, 3, 6, seed=42)
        b = generate_regular(8, 3, 6, seed=42)
        assert a.edges == b.edges

    def test_different_seed_usually_differs(self):
        graphs = {generate_regular(12, 3, 6, seed=s).edges for s in range(5)}
        assert len(graphs) > 1

    def test_handshake(self):
        for s in range(5):
            g = generate_regular(8, 3, 4, seed=s)
            assert int(g.var_degrees.sum()) == int(g.check_degrees.sum()) == g.num_edges
            assert g.num_edges == g.n * g.l

    def test_no_parallel_edges(self):
        g = generate_regular(16, 3, 6, seed=11)
        assert len(set(g.edges)) == len(g.edges)


class TestGraphTypes:
    def test_biregular_validation(self):
        with pytest.raises(InfeasibleParameters):
            TannerGraph(2, 1, ((0, 0), (1, 0)), l=2, r=2)

    def test_parallel_edge_rejected(self):
        with pytest.raises(InfeasibleParameters):
            BipartiteGraph(2, 1, ((0, 0), (0, 0), (1, 0)))

    def test_relabel_preserves_structure(self):
        g = generate_regular(8, 3, 4, seed=5)
        perm_v = np.random.default_rng(0).permutation(8)
        perm_c = np.random.default_rng(1).permutation(6)
        g2 = g.relabeled(perm_v, perm_c)
        assert g2.l == g.l and g2.r == g.r and g2.num_edges == g.num_edges


class TestParityCheckMatrix:
    def test_triple_check_rows_identical(self, triple_check):
        H = parity_check_matrix(triple_check)
        assert np.array_equal(H[0], H[1]) and np.array_equal(H[1], H[2])
        assert H.sum() == 18

    def test_row_and_column_sums(self):
        g = generate_regular(8, 3, 4, seed=9)
        H = parity_check_matrix(g)
        assert np.all(H.sum(axis=1) == g.r)
        assert np.all(H.sum(axis=0) == g.l)


class TestGF2:
    def test_identity_rank(self):
        assert gf2_rank(np.eye(3, dtype=np.uint8)) == 3

    def test_repeated_rows(self):
        M = np.ones((3, 4), dtype=np.uint8)
        assert gf2_rank(M) == 1

    def test_zero_matrix(self):
        assert gf2_rank(np.zeros((2, 5), dtype=np.uint8)) == 0

    def test_rank_bound_and_triple_check(self, triple_check):
        H = parity_check_matrix(triple_check)
        assert gf2_rank(H) == 1
        for s in range(4):
            g = generate_regular(8, 3, 4, seed=s)
            r = gf2_rank(parity_check_matrix(g))
            assert r <= min(g.m, g.n)

    def test_nullspace_vectors_are_codewords(self):
        g = generate_regular(8, 3, 6, seed=3)
        H = parity_check_matrix(g)
        basis = gf2_nullspace(H)
        assert basis.shape[0] == g.n - gf2_rank(H)
        assert not np.any((basis @ H.T) % 2)


class TestExpander:
    def test_triple_check_small_lambda(self, triple_check):
        rep = is_expander(triple_check, 0.4, 0.5)
        assert rep.is_expander and rep.witness is None

    def test_triple_check_large_lambda_fails(self, triple_check):
        rep = is_expander(triple_check, 0.6, 0.5)
        assert not rep.is_expander
        assert len(rep.witness) == 3  # any 3-subset sees 3 < 4.5 checks

    def test_vacuous_when_lambda_n_at_most_one(self):
        g = generate_regular(8, 3, 6, seed=0)
        rep = is_expander(g, 1.0 / g.n, 0.5)
        assert rep.is_expander and rep.subsets_checked == 0

    def test_monotone_in_lambda_and_kappa(self):
        g = generate_regular(12, 3, 6, seed=4)
        for lam, kap in [(0.3, 0.4), (0.3, 0.3), (0.2, 0.4)]:
            base = is_expander(g, 0.3, 0.4).is_expander
            if base:
                assert is_expander(g, lam, kap).is_expander

    def test_cap_refusal(self):
        g = generate_regular(24, 3, 6, seed=0)
        with pytest.raises(CapExceeded):
            is_expander(g, 0.99, 0.5, subset_cap=1000)


class TestExpansionThreshold:
    def test_root_exceeds_quoted_value(self):
        lam0 = expansion_threshold(3, 6, 0.5)
        assert lam0 >= 5e-4

    def test_residual_small(self):
        lam0 = expansion_threshold(3, 6, 0.5)
        kr = 3.0
        resid = (
            (2.0 / 3.0) * binary_entropy(lam0)
            - binary_entropy(lam0 * kr) / 6.0
            - lam0 * kr * binary_entropy(1.0 / kr)
        )
        assert abs(resid) < 1e-8

    def test_base_invariance(self):
        # the rate equation is homogeneous in the entropy base: scaling all
        # three terms by 1/ln(2) does not move the root, so the natural-log
        # residual at the root is also (up to scale) the base-2 residual
        lam0 = expansion_threshold(3, 6, 0.5)
        kr = 3.0
        nat = (
            (2.0 / 3.0) * binary_entropy(lam0)
            - binary_entropy(lam0 * kr) / 6.0
            - lam0 * kr * binary_entropy(1.0 / kr)
        )
        assert abs(nat / math.log(2)) < 1e-8

    def test_kappa_interval_and_warning(self):
        lo, hi = admissible_kappa_interval(3, 6)
        assert abs(lo - 4.0 / 9.0) < 1e-15 and abs(hi - 2.0 / 3.0) < 1e-15
        with pytest.warns(UserWarning):
            expansion_threshold(3, 6, 0.9, grid_points=10_000)

    def test_kappa_r_below_one_rejected(self):
        with pytest.raises(ValueError):
            expansion_threshold(3, 6, 0.15, grid_points=100)


class TestAlist:
    def test_round_trip_regular(self):
        g = generate_regular(8, 3, 4, seed=13)
        g2 = load_alist(save_alist(g))
        assert isinstance(g2, TannerGraph) and g2 == g

    def test_round_trip_irregular(self):
        g = zoo.bowtie_graph()
        assert load_alist(save_alist(g)) == g

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_round_trip_random_seeds(self, seed):
        g = generate_regular(8, 3, 6, seed=seed)
        assert load_alist(save_alist(g)) == g

    def test_degree_mismatch_rejected(self):
        g = generate_regular(6, 3, 6, seed=1)
        lines = save_alist(g).decode().splitlines()
        lines[2] = " ".join(["2"] * 6)  # column degrees contradict adjacency
        with pytest.raises(AlistError):
            load_alist("\n".join(lines).encode())

    def test_zero_based_index_rejected(self):
        g = generate_regular(6, 3, 6, seed=1)
        lines = save_alist(g).decode().splitlines()
        lines[4] = "0 1 2"  # indices are 1-based
        with pytest.raises(AlistError):
            load_alist("\n".join(lines).encode())

    def test_garbage_header_rejected(self):
        with pytest.raises(AlistError):
            load_alist(b"not an alist\n")
