import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpdist.distmat import (
    DistanceMatrix,
    NotEmbeddable,
    PointCloud,
    StructureError,
    delta_product,
    embed_points,
    from_points,
    hadamard_power,
    schoenberg_gram,
    validate,
)
from cpdist.harness import random_distance_matrix

from .helpers import COLLINEAR, SQUARE_L1, seeds

EIG_EX1 = DistanceMatrix.from_upper(4, [2, 3, 1, 1, 3, 2])


class TestStructure:
    def test_asymmetric(self):
        with pytest.raises(StructureError):
            DistanceMatrix([[0, 1], [2, 0]])

    def test_negative(self):
        with pytest.raises(StructureError):
            DistanceMatrix([[0, -1], [-1, 0]])

    def test_diagonal(self):
        with pytest.raises(StructureError):
            DistanceMatrix([[1, 1], [1, 0]])

    def test_zero_entries_allowed(self):
        D = DistanceMatrix([[0, 0, 1], [0, 0, 1], [1, 1, 0]])
        assert D.is_valid and not D.is_positive

    def test_upper_round_trip(self):
        D = DistanceMatrix.from_upper(4, [2, 3, 1, 1, 3, 2])
        assert D.d[0, 3] == 1 and D.d[1, 2] == 1
        assert DistanceMatrix.from_json(D.to_json()) == D

    def test_upper_wrong_count(self):
        with pytest.raises(StructureError):
            DistanceMatrix.from_upper(4, [1, 2, 3])


class TestValidate:
    def test_eig_ex1(self):
        assert validate(EIG_EX1).ok

    def test_witness(self):
        v = validate(DistanceMatrix.from_upper(3, [1, 3, 1]))
        assert not v.ok
        assert v.witness == (0, 2, 1)
        assert v.margin == pytest.approx(1.0)

    def test_square_l1(self):
        assert validate(SQUARE_L1).ok

    def test_flat_triangle_valid(self):
        assert validate(COLLINEAR).ok

    def test_permutation_equivariant(self, rng):
        for _ in range(1000):
            n = int(rng.integers(3, 7))
            d = rng.random((n, n))
            d = np.triu(d, 1)
            D = DistanceMatrix(d + d.T)
            p = rng.permutation(n)
            assert validate(D).ok == validate(DistanceMatrix(D.d[np.ix_(p, p)])).ok


class TestFromPoints:
    def test_collinear(self):
        np.testing.assert_array_equal(from_points([[0.0], [1.0], [3.0]]).d, COLLINEAR.d)

    def test_square_corners_l1(self):
        pts = [[0, 0], [1, 0], [0, 1], [1, 1]]
        assert from_points(PointCloud(pts, 1)) == SQUARE_L1

    def test_linf_entrywise(self, rng):
        pts = rng.random((5, 3))
        D = from_points(PointCloud(pts, np.inf))
        for i in range(5):
            for j in range(5):
                assert D.d[i, j] == max(abs(pts[i, k] - pts[j, k]) for k in range(3))

    def test_bad_p(self):
        with pytest.raises(ValueError):
            PointCloud([[0.0], [1.0]], 0.5)

    def test_always_valid(self, rng):
        for _ in range(1000):
            n, N = int(rng.integers(2, 8)), int(rng.integers(1, 6))
            p = [1.0, 1.5, 2.0, 3.0, np.inf][int(rng.integers(5))]
            assert from_points(PointCloud(rng.standard_normal((n, N)), p)).is_valid


class TestHadamard:
    def test_identity_power(self):
        assert hadamard_power(SQUARE_L1, 1) == SQUARE_L1

    def test_square_breaks_line(self):
        D = hadamard_power(COLLINEAR, 2)
        np.testing.assert_array_equal(D.d, [[0, 1, 9], [1, 0, 4], [9, 4, 0]])
        assert not D.is_valid

    def test_half_power_valid(self):
        D = random_distance_matrix(6, np.random.default_rng(3))
        assert hadamard_power(D, 0.5).is_valid

    def test_snowflake_closure(self, rng):
        for _ in range(1000):
            D = random_distance_matrix(int(rng.integers(3, 7)), rng)
            p = rng.uniform(0, 1)
            assert hadamard_power(D, p).is_valid

    def test_nonpositive(self):
        with pytest.raises(ValueError):
            hadamard_power(SQUARE_L1, 0)


class TestSchoenberg:
    def test_collinear(self):
        res = schoenberg_gram(COLLINEAR)
        np.testing.assert_allclose(res.gram, [[1, 3], [3, 9]])
        assert res.psd and res.rank == 1

    @pytest.mark.parametrize("b4,det", [(1, -1 / 16), (1.5, -529 / 1024), (2, -121 / 64)])
    def test_delta_family(self, b4, det):
        res = schoenberg_gram(delta_product([1, 1, 0.5, b4]))
        assert res.det == pytest.approx(det, abs=1e-12)
        assert not res.psd

    def test_square_l2(self):
        res = schoenberg_gram(from_points(PointCloud([[0, 0], [1, 0], [0, 1], [1, 1]], 2)))
        assert res.psd and res.rank == 2

    def test_square_l1_not_l2(self):
        assert not schoenberg_gram(SQUARE_L1).psd


class TestEmbed:
    def test_collinear(self):
        pts = embed_points(COLLINEAR)
        assert pts.points.shape[1] == 1
        np.testing.assert_allclose(from_points(pts).d, COLLINEAR.d, atol=1e-10)

    def test_square_l1(self):
        assert isinstance(embed_points(SQUARE_L1), NotEmbeddable)

    def test_delta_not_embeddable(self):
        res = embed_points(delta_product([1, 1, 0.5, 1]))
        assert isinstance(res, NotEmbeddable) and res.min_eigenvalue < 0

    def test_round_trip(self, rng):
        for _ in range(200):
            n, N = int(rng.integers(2, 8)), int(rng.integers(1, 5))
            D = from_points(rng.standard_normal((n, N)))
            pts = embed_points(D)
            assert pts.points.shape[1] <= N
            np.testing.assert_allclose(from_points(pts).d, D.d, atol=1e-8)


class TestDeltaProduct:
    def test_equilateral(self):
        D = delta_product([1, 1, 1])
        assert D.is_valid and np.all(D.d + np.eye(3) == 1)

    def test_entries(self):
        b = [1, 1, 0.5, 1.5]
        D = delta_product(b)
        for i in range(4):
            for j in range(4):
                assert D.d[i, j] == (0 if i == j else b[i] * b[j])
        # 1*1.5 + 1*1.5 >= 1; 0.5*1.5 + 1*0.5 >= 1.5 fails
        assert not D.is_valid

    def test_negative(self):
        with pytest.raises(StructureError):
            delta_product([1, -1, 1])

    @settings(max_examples=1000, deadline=None)
    @given(seeds, st.integers(3, 7))
    def test_interlacing(self, seed, n):
        r = np.random.default_rng(seed)
        a1, a2 = np.sort(r.uniform(0.05, 1.0, 2))[::-1]
        # the tightest triangle pairs the two largest with the smallest entry
        floor = a1 * a2 / (a1 + a2)
        rest = np.sort(r.uniform(floor, a2, n - 2))[::-1]
        a = np.concatenate([[a1, a2], rest])
        assert delta_product(a).is_valid
        b = a[1:] + r.uniform(0, 1, n - 1) * (a[:-1] - a[1:])
        assert delta_product(b).is_valid
