import itertools
import math

import numpy as np
import pytest

from loopcorr import (
    codeword_basis,
    conditional_entropy_direct,
    conditional_entropy_exact,
    generate_regular,
    gf2_rank,
    log_partition,
    parity_check_matrix,
    zoo,
)
from loopcorr.errors import CapExceeded

LN2 = math.log(2.0)


def brute_logz(g, h_fields):
    """Oracle: direct sum over the kernel in coefficient-counting order."""
    cw = codeword_basis(g)
    total = 0.0
    for bits in itertools.product((0, 1), repeat=cw.dimension):
        x = np.zeros(g.n, dtype=np.uint8)
        for j, b in enumerate(bits):
            if b:
                x ^= cw.basis[j]
        total += math.exp(float(np.sum(np.where(x == 0, h_fields, -h_fields))))
    return math.log(total)


class TestCodewordBasis:
    def test_triple_check_dimension(self, triple_check):
        assert codeword_basis(triple_check).dimension == 5

    def test_full_rank_gives_trivial_code(self):
        # identity-like H: one check per variable pair chain with full rank
        g = zoo.path_graph(4)  # tree: m = n - 1, full rank
        cw = codeword_basis(g)
        assert cw.rank == g.m
        assert cw.dimension == g.n - g.m

    def test_basis_vectors_satisfy_checks(self):
        for s in range(3):
            g = generate_regular(8, 3, 4, seed=s)
            cw = codeword_basis(g)
            H = parity_check_matrix(g)
            assert not np.any((cw.basis @ H.T) % 2)


class TestLogPartition:
    def test_h_zero_counts_codewords(self, triple_check):
        assert log_partition(triple_check, np.zeros(6)) == pytest.approx(5 * LN2, abs=1e-12)

    def test_single_check_closed_form(self):
        g = zoo.single_check(2)
        h = 0.37
        assert log_partition(g, np.array([h, h])) == pytest.approx(
            math.log(2 * math.cosh(2 * h)), abs=1e-13
        )

    def test_matches_brute_sum(self):
        for s in range(3):
            g = generate_regular(8, 3, 4, seed=s)
            h = np.random.default_rng(s).normal(0, 0.3, 8)
            a = log_partition(g, h)
            b = brute_logz(g, h)
            assert a == pytest.approx(b, rel=1e-12)

    def test_derivative_bounded_by_one(self):
        g = generate_regular(8, 3, 6, seed=1)
        h = np.full(8, 0.2)
        delta = 1e-6
        base = log_partition(g, h)
        for i in (0, 3):
            hp = h.copy()
            hp[i] += delta
            assert abs(log_partition(g, hp) - base) <= delta * (1 + 1e-9)

    def test_convex_in_each_field(self):
        g = generate_regular(8, 3, 4, seed=2)
        h = np.full(8, 0.1)
        delta = 1e-4
        for i in (0, 5):
            vals = []
            for off in (-delta, 0.0, delta):
                hp = h.copy()
                hp[i] += off
                vals.append(log_partition(g, hp))
            second = (vals[0] - 2 * vals[1] + vals[2]) / delta**2
            assert second >= -1e-6

    def test_kernel_cap(self, triple_check):
        with pytest.raises(CapExceeded):
            log_partition(triple_check, np.zeros(6), cap=3)


class TestConditionalEntropy:
    def test_cross_oracle_agreement(self):
        graphs = [zoo.triple_check_graph(), zoo.single_check(3), zoo.cycle_graph(3)]
        graphs += [generate_regular(8, 3, 4, seed=s) for s in range(2)]
        for g in graphs:
            for p in (0.3, 0.4, 0.45):
                a = conditional_entropy_exact(g, p)
                b = conditional_entropy_direct(g, p)
                assert a == pytest.approx(b, abs=1e-10)

    def test_p_half_closed_form(self, triple_check):
        rank = gf2_rank(parity_check_matrix(triple_check))
        expected = (1 - rank / 6) * LN2
        assert conditional_entropy_exact(triple_check, 0.5) == pytest.approx(expected, abs=1e-12)
        assert conditional_entropy_direct(triple_check, 0.5) == pytest.approx(expected, abs=1e-12)

    def test_channel_symmetry(self, triple_check):
        a = conditional_entropy_exact(triple_check, 0.3)
        b = conditional_entropy_exact(triple_check, 0.7)
        assert a == pytest.approx(b, abs=1e-12)

    def test_trivial_code_zero_entropy(self):
        g = zoo.path_graph(4)  # full-rank H, only the zero codeword
        assert conditional_entropy_direct(g, 0.4) == pytest.approx(0.0, abs=1e-12)

    def test_output_cap(self):
        g = generate_regular(24, 3, 6, seed=0)
        with pytest.raises(CapExceeded):
            conditional_entropy_exact(g, 0.4, output_cap=20)
