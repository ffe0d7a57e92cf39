import math

import numpy as np
import pytest

from loopcorr import MessageSet, bp_solve, bp_update, check_high_noise, generate_regular, update_residual
from loopcorr import zoo


def scalar_fixed_point(h, l, r, damping=0.5, iters=4000):
    """Independent oracle: the uniform-message recursion
    eta' = h + (l-1)*eta_hat, eta_hat' = atanh(tanh(eta)^(r-1))."""
    eta, eta_hat = h, 0.0
    for _ in range(iters):
        new_eta = h + (l - 1) * eta_hat
        new_hat = math.atanh(math.tanh(eta) ** (r - 1))
        eta = (1 - damping) * new_eta + damping * eta
        eta_hat = (1 - damping) * new_hat + damping * eta_hat
    return eta, eta_hat


class TestBPUpdate:
    def test_zero_is_fixed_point(self):
        g = generate_regular(8, 3, 6, seed=0)
        msgs = MessageSet.zeros(g)
        out = bp_update(g, np.zeros(8), msgs)
        assert np.all(out.eta == 0) and np.all(out.eta_hat == 0)

    def test_uniform_matches_scalar_recursion(self):
        g = generate_regular(8, 3, 6, seed=1)
        h = 0.07
        eta0, hat0 = 0.03, 0.001
        msgs = MessageSet(g, np.full(g.num_edges, eta0), np.full(g.num_edges, hat0))
        out = bp_update(g, np.full(8, h), msgs, damping=0.0)
        assert np.allclose(out.eta, h + (g.l - 1) * hat0, atol=1e-15)
        assert np.allclose(out.eta_hat, math.atanh(math.tanh(eta0) ** (g.r - 1)), atol=1e-15)

    def test_trivial_sentinel_maps_to_itself(self):
        g = generate_regular(8, 3, 6, seed=2)
        triv = MessageSet.trivial(g)
        assert bp_update(g, np.zeros(8), triv) is triv

    def test_clamp_flag_set_when_saturating(self):
        g = zoo.cycle_graph(2)
        big = np.full(g.num_edges, 25.0)
        msgs = MessageSet(g, big, big)
        out = bp_update(g, np.full(g.n, 1.0), msgs)
        assert out.clamped


class TestBPSolve:
    def test_h_zero_converges_immediately(self):
        g = generate_regular(8, 3, 6, seed=3)
        res = bp_solve(g, np.zeros(8))
        assert res.converged and res.iterations == 1
        assert np.all(res.messages.eta == 0)

    def test_uniform_field_scalar_oracle(self):
        g = generate_regular(8, 3, 6, seed=4)
        h = 0.05
        res = bp_solve(g, np.full(8, h))
        assert res.converged
        eta_ref, hat_ref = scalar_fixed_point(h, 3, 6)
        assert np.allclose(res.messages.eta, eta_ref, atol=1e-10)
        assert np.allclose(res.messages.eta_hat, hat_ref, atol=1e-10)
        # magnitudes from the recursion itself
        assert eta_ref == pytest.approx(0.0500006, abs=5e-7)
        assert hat_ref == pytest.approx(3.12e-7, rel=5e-3)

    def test_max_iter_zero_returns_init(self):
        g = generate_regular(8, 3, 6, seed=5)
        h = np.full(8, 0.1)
        res = bp_solve(g, h, max_iter=0)
        assert not res.converged
        assert np.allclose(res.messages.eta, h[g.edge_var])
        assert np.all(res.messages.eta_hat == 0)

    def test_converged_residual_recheck(self):
        g = generate_regular(8, 3, 4, seed=6)
        h = np.full(8, 0.05)
        res = bp_solve(g, h, tol=1e-12)
        assert update_residual(g, h, res.messages) < 1e-11

    def test_sign_covariance(self):
        g = generate_regular(8, 3, 6, seed=7)
        h = np.full(8, 0.04)
        plus = bp_solve(g, h).messages
        minus = bp_solve(g, -h).messages
        assert np.allclose(plus.eta, -minus.eta, atol=1e-12)
        assert np.allclose(plus.eta_hat, -minus.eta_hat, atol=1e-12)

    def test_permutation_equivariance(self):
        g = generate_regular(8, 3, 6, seed=8)
        rng = np.random.default_rng(0)
        perm_v = rng.permutation(8)
        perm_c = rng.permutation(4)
        g2 = g.relabeled(perm_v, perm_c)
        h = rng.normal(0, 0.05, 8)
        h2 = np.empty(8)
        h2[perm_v] = h
        m1 = bp_solve(g, h).messages
        m2 = bp_solve(g2, h2).messages
        for (i, a) in g.edges:
            assert m1.eta_at(i, a) == pytest.approx(m2.eta_at(perm_v[i], perm_c[a]), abs=1e-12)
            assert m1.eta_hat_at(i, a) == pytest.approx(m2.eta_hat_at(perm_v[i], perm_c[a]), abs=1e-12)


class TestHighNoise:
    def test_zero_messages_pass(self):
        g = generate_regular(8, 3, 6, seed=9)
        assert check_high_noise(MessageSet.zeros(g), 0.05, 3, 6)

    def test_trivial_sentinel_fails(self):
        g = generate_regular(8, 3, 6, seed=9)
        assert not check_high_noise(MessageSet.trivial(g), 0.05, 3, 6)

    def test_oversized_message_fails(self):
        g = generate_regular(8, 3, 6, seed=10)
        h = 0.01
        eta = np.zeros(g.num_edges)
        eta[0] = 2 * h  # 0.02 > h + 2 h^5 + 2 h^6
        assert not check_high_noise(MessageSet(g, eta, np.zeros(g.num_edges)), h, 3, 6, slack=2.0)

    def test_solved_messages_pass(self):
        g = generate_regular(8, 3, 6, seed=11)
        h = 0.05
        res = bp_solve(g, np.full(8, h))
        assert check_high_noise(res.messages, h, 3, 6)
