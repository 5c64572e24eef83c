import numpy as np
import pytest

from conftest import random_spec
from cubewalk.oracle import DenseSystem, SingularMatrixError, direct_solve, neumann_sum_dense
from cubewalk.walks import build_transition_matrix


class TestDirectSolve:
    def test_identity(self, rng):
        b = rng.uniform(-1, 1, 6)
        assert np.allclose(direct_solve(DenseSystem(np.eye(6), b)), b)

    def test_stochastic_row_sums(self, rng):
        # P @ 1 = 1, so (1 - gamma P) x = (1 - gamma) * 1 has x = 1
        gamma = 0.4
        p = build_transition_matrix(random_spec(rng, 4)).entries
        a = np.eye(16) - gamma * p
        x = direct_solve(DenseSystem(a, (1 - gamma) * np.ones(16)))
        assert np.abs(x - 1.0).max() < 1e-10

    def test_residual_contract(self, rng):
        p = build_transition_matrix(random_spec(rng, 6)).entries
        a = np.eye(64) - 0.5 * p
        b = rng.uniform(-1, 1, 64)
        x = direct_solve(DenseSystem(a, b))
        assert np.abs(a @ x - b).max() <= 1e-9 * np.abs(b).max()

    def test_singularity_detected(self):
        a = np.array([[1.0, 2.0], [2.0, 4.0]])  # rank 1
        with pytest.raises(SingularMatrixError):
            direct_solve(DenseSystem(a, np.ones(2)))

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            DenseSystem(np.ones((2, 3)), np.ones(2))
        with pytest.raises(ValueError):
            DenseSystem(np.eye(3), np.ones(2))


class TestNeumannSum:
    def test_zero_order_is_b(self, rng):
        p = build_transition_matrix(random_spec(rng, 3)).entries
        b = rng.uniform(-1, 1, 8)
        assert np.array_equal(neumann_sum_dense(p, 0.3, b, 0), b)

    def test_converges_to_direct(self, rng):
        gamma, c = 0.5, 40
        p = build_transition_matrix(random_spec(rng, 4)).entries
        b = rng.uniform(-1, 1, 16)
        truncated = neumann_sum_dense(p, gamma, b, c)
        exact = direct_solve(DenseSystem(np.eye(16) - gamma * p, b))
        bound = gamma ** (c + 1) * np.abs(b).max() / (1 - gamma)
        assert np.abs(truncated - exact).max() <= bound + 1e-15

    def test_truncation_bound_every_order(self, rng):
        gamma = 0.3
        p = build_transition_matrix(random_spec(rng, 4, kind="classical")).entries
        b = rng.uniform(-1, 1, 16)
        exact = direct_solve(DenseSystem(np.eye(16) - gamma * p, b))
        for c in range(12):
            bound = gamma ** (c + 1) * np.abs(b).max() / (1 - gamma)
            assert np.abs(neumann_sum_dense(p, gamma, b, c) - exact).max() <= bound + 1e-15

    def test_weighted_variant(self, rng):
        # same contract with a general contraction in place of gamma * P
        p = build_transition_matrix(random_spec(rng, 3)).entries
        v = rng.uniform(-1, 1, (8, 8))
        v = (v + v.T) / 2
        bmat = p * v
        bmat *= 0.5 / np.abs(np.linalg.eigvals(bmat)).max()
        b = rng.uniform(-1, 1, 8)
        total = neumann_sum_dense(bmat, 1.0, b, 30)
        exact = direct_solve(DenseSystem(np.eye(8) - bmat, b))
        assert np.abs(total - exact).max() < 1e-8

    def test_accepts_transition_matrix(self, rng):
        tm = build_transition_matrix(random_spec(rng, 3))
        b = rng.uniform(-1, 1, 8)
        assert np.allclose(
            neumann_sum_dense(tm, 0.3, b, 3), neumann_sum_dense(tm.entries, 0.3, b, 3)
        )

    def test_negative_order_rejected(self, rng):
        tm = build_transition_matrix(random_spec(rng, 2))
        with pytest.raises(ValueError):
            neumann_sum_dense(tm, 0.3, np.ones(4), -1)
