import numpy as np
import pytest
from hypothesis import given, settings

from cpdist.distmat import DistanceMatrix
from cpdist.semimetrics import (
    NotPSDError,
    WedgeOperatorQ,
    cost_matrix,
    hs_distance,
    pure_state_cost,
    semidistance,
)
from cpdist.triangular import conjugate_local
from cpdist.wedge import DimensionError, compound2, haar_unitary, inner, wedge

from .helpers import SQUARE_L1, rand_psd, rand_state, seeds

# brute-force quadratic form: only pairs (1,3), (2,3) are hit,
# sqrt(1/2 * 1**2 + 1/2 * 2**2)
SQUARE_L1_VALUE = 1.5811388300841898


def e(n, i):
    v = np.zeros(n, dtype=complex)
    v[i] = 1
    return v


class TestHS:
    def test_orthogonal(self):
        assert hs_distance(e(3, 0), e(3, 2)) == 1.0

    def test_phase(self, rng):
        x = rand_state(rng, 4)
        assert hs_distance(x, np.exp(1.3j) * x) < 1e-7

    def test_matches_wedge(self, rng):
        for _ in range(500):
            x, y = rand_state(rng, 5), rand_state(rng, 5)
            assert abs(hs_distance(x, y) - np.linalg.norm(wedge(x, y))) < 1e-12

    def test_dims(self):
        with pytest.raises(DimensionError):
            hs_distance(np.ones(2), np.ones(3))


class TestOperator:
    def test_rejects_non_psd(self):
        with pytest.raises(NotPSDError):
            WedgeOperatorQ(-np.eye(3))

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotPSDError):
            WedgeOperatorQ(np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1]]))

    def test_bad_size(self):
        with pytest.raises(DimensionError):
            WedgeOperatorQ(np.eye(4))

    def test_diagonal_form_eigenvectors(self, rng):
        U = haar_unitary(4, rng)
        op = WedgeOperatorQ.from_dmat(SQUARE_L1, U)
        assert op.diagonal_residual() < 1e-10
        for i in range(4):
            for j in range(i + 1, 4):
                w = wedge(U[:, i], U[:, j])
                np.testing.assert_allclose(op.Q @ w, SQUARE_L1.d[i, j] ** 2 * w, atol=1e-10)

    def test_from_E(self, rng):
        A = rand_psd(rng, 6)
        op = WedgeOperatorQ.from_E(A)
        np.testing.assert_allclose(op.Q, A @ A, atol=1e-9)
        np.testing.assert_allclose(op.E(), A, atol=1e-8)

    def test_json_round_trip(self, rng):
        op = WedgeOperatorQ.from_dmat(SQUARE_L1, haar_unitary(4, rng))
        back = WedgeOperatorQ.from_json(op.to_json())
        np.testing.assert_allclose(back.Q, op.Q, atol=1e-14)
        assert back.dmat == op.dmat
        dense = WedgeOperatorQ(op.Q)
        assert dense.to_json()["form"] == "dense"
        np.testing.assert_allclose(WedgeOperatorQ.from_json(dense.to_json()).Q, op.Q)


class TestSemidistance:
    def test_identity_is_hs(self, rng):
        op = WedgeOperatorQ.identity(5)
        for _ in range(200):
            x, y = rand_state(rng, 5), rand_state(rng, 5)
            assert abs(semidistance(op, x, y) - hs_distance(x, y)) < 1e-12

    def test_basis_labels(self):
        op = WedgeOperatorQ.from_dmat(SQUARE_L1)
        for i in range(4):
            for j in range(4):
                if i != j:
                    assert abs(semidistance(op, e(4, i), e(4, j)) - SQUARE_L1.d[i, j]) < 1e-14

    def test_square_l1_value(self):
        op = WedgeOperatorQ.from_dmat(SQUARE_L1)
        x = (e(4, 0) + e(4, 1)) / np.sqrt(2)
        assert abs(semidistance(op, x, e(4, 2)) - SQUARE_L1_VALUE) < 1e-12
        # dense path gives the same
        dense = WedgeOperatorQ(op.Q)
        assert abs(semidistance(dense, x, e(4, 2)) - SQUARE_L1_VALUE) < 1e-12

    def test_symmetry(self, rng):
        Q = rand_psd(rng, 10)
        op = WedgeOperatorQ(Q)
        for _ in range(10_000):
            x, y = rand_state(rng, 5), rand_state(rng, 5)
            assert abs(semidistance(op, x, y) - semidistance(op, y, x)) < 1e-12

    @settings(max_examples=50)
    @given(seeds)
    def test_phase_invariance(self, seed):
        r = np.random.default_rng(seed)
        op = WedgeOperatorQ(rand_psd(r, 6))
        x, y = rand_state(r, 4), rand_state(r, 4)
        a, b = r.uniform(0, 2 * np.pi, 2)
        v = semidistance(op, x, y)
        assert abs(semidistance(op, np.exp(1j * a) * x, np.exp(1j * b) * y) - v) < 1e-12 * max(1, v)

    def test_nondegenerate(self, rng):
        op = WedgeOperatorQ(rand_psd(rng, 6) + 0.1 * np.eye(6))
        x = rand_state(rng, 4)
        assert semidistance(op, x, np.exp(0.4j) * x) < 1e-7
        for _ in range(200):
            y = rand_state(rng, 4)
            if abs(1 - abs(inner(x, y))) > 1e-10:
                assert semidistance(op, x, y) > 0

    def test_unitary_covariance(self, rng):
        op = WedgeOperatorQ(rand_psd(rng, 10))
        for _ in range(100):
            U = haar_unitary(5, rng)
            C = compound2(U)
            rotated = WedgeOperatorQ(C.conj().T @ op.Q @ C)
            x, y = rand_state(rng, 5), rand_state(rng, 5)
            assert abs(semidistance(op, U @ x, U @ y) - semidistance(rotated, x, y)) < 1e-10
            assert abs(semidistance(conjugate_local(op, U), x, y) - semidistance(rotated, x, y)) < 1e-10

    def test_clamped_at_zero(self):
        assert semidistance(WedgeOperatorQ.zeros(3), e(3, 0), e(3, 1)) == 0.0


class TestCostMatrix:
    def test_eigenvalues(self, rng):
        U = haar_unitary(4, rng)
        C = cost_matrix(SQUARE_L1, U)
        w = np.sort(np.linalg.eigvalsh(C))
        labels = np.sort(SQUARE_L1.upper())
        np.testing.assert_allclose(w[-6:], labels, atol=1e-12)
        np.testing.assert_allclose(w[:10], 0, atol=1e-12)

    def test_trace(self, rng):
        C = cost_matrix(SQUARE_L1, haar_unitary(4, rng))
        assert abs(np.trace(C).real - SQUARE_L1.upper().sum()) < 1e-12

    def test_psd(self):
        assert np.linalg.eigvalsh(cost_matrix(SQUARE_L1)).min() > -1e-12

    def test_pure_state_reduction(self, rng):
        # normalised antisymmetric vectors carry a factor 1/2 relative to the
        # flat wedge coordinates
        U = haar_unitary(4, rng)
        C = cost_matrix(SQUARE_L1, U)
        op = WedgeOperatorQ.from_dmat(SQUARE_L1, U)
        for _ in range(200):
            x, y = rand_state(rng, 4), rand_state(rng, 4)
            assert abs(pure_state_cost(C, x, y) - semidistance(op, x, y) ** 2 / 2) < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            cost_matrix(SQUARE_L1, np.eye(3))
