"""
Unit tests for feature-map pooling, alignment and row normalisation
"""
import numpy as np
import pytest

from src.core.embed_pipeline import (
    AlignmentMap, FeatureMap, adaptive_pool, feature_align, row_normalize
)
from src.core.errors import DimensionMismatch, EmptyFeatureMap, ShapeMismatch, ValidationError
from src.core.token_space import EmbeddingMatrix


def pool_oracle(fm: np.ndarray, n_img: int, out_dim: int) -> np.ndarray:
    """Nested-loop bin means over (positions, channels)"""
    channels = fm.shape[0]
    positions = fm.shape[1] * fm.shape[2]
    out = np.zeros((n_img, out_dim))
    for r in range(n_img):
        p0 = (r * positions) // n_img
        p1 = max(((r + 1) * positions) // n_img, p0 + 1)
        for c in range(out_dim):
            c0 = (c * channels) // out_dim
            c1 = max(((c + 1) * channels) // out_dim, c0 + 1)
            total, count = 0.0, 0
            for p in range(p0, p1):
                h, w = divmod(p, fm.shape[2])
                for ch in range(c0, c1):
                    total += fm[ch, h, w]
                    count += 1
            out[r, c] = total / count
    return out


@pytest.mark.unit
class TestAdaptivePool:
    """Test adaptive average pooling"""

    def test_mean_of_all_cells(self):
        fm = FeatureMap(np.array([1.0, 2.0, 3.0, 4.0]).reshape(1, 2, 2))
        assert adaptive_pool(fm, 1, 1).data.tolist() == [[2.5]]

    def test_one_bin_per_channel(self):
        fm = FeatureMap(np.array([3.0, 5.0]).reshape(2, 1, 1))
        assert adaptive_pool(fm, 1, 2).data.tolist() == [[3.0, 5.0]]

    def test_matches_nested_loop_oracle(self):
        values = np.random.default_rng(1).random((4, 3, 3))
        pooled = adaptive_pool(FeatureMap(values), 2, 2)
        assert pooled.data.shape == (2, 2)
        np.testing.assert_allclose(pooled.data, pool_oracle(values, 2, 2), atol=1e-12)

    @pytest.mark.parametrize("shape,n_img,out_dim", [
        ((8, 6, 6), 9, 4),
        ((5, 4, 7), 28, 5),
        ((3, 2, 2), 7, 6),   # more bins than cells
    ])
    def test_uneven_partitions(self, shape, n_img, out_dim):
        values = np.random.default_rng(sum(shape)).normal(size=shape)
        pooled = adaptive_pool(FeatureMap(values), n_img, out_dim)
        np.testing.assert_allclose(pooled.data, pool_oracle(values, n_img, out_dim), atol=1e-12)

    def test_empty_feature_map(self):
        with pytest.raises(EmptyFeatureMap):
            adaptive_pool(FeatureMap(np.zeros((2, 0, 3))), 1, 1)

    def test_bad_bin_counts(self):
        with pytest.raises(ValidationError):
            adaptive_pool(FeatureMap(np.ones((1, 2, 2))), 0, 1)

    def test_feature_map_rank(self):
        with pytest.raises(ShapeMismatch):
            FeatureMap(np.ones((2, 2)))


@pytest.mark.unit
class TestFeatureAlign:
    """Test the linear alignment into text space"""

    def test_identity(self):
        x = EmbeddingMatrix([[1.0, 0.0], [0.0, 1.0]])
        assert feature_align(x, AlignmentMap(np.eye(2))).data.tolist() == [[1.0, 0.0], [0.0, 1.0]]

    def test_embedding_into_larger_dim(self):
        x = EmbeddingMatrix([[1.0, 2.0]])
        weights = AlignmentMap([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        assert feature_align(x, weights).data.tolist() == [[1.0, 2.0, 0.0]]

    def test_matches_matrix_product_oracle(self):
        x = np.random.default_rng(2).random((3, 4))
        w = np.random.default_rng(3).random((4, 2))
        expected = np.zeros((3, 2))
        for i in range(3):
            for j in range(2):
                expected[i, j] = sum(x[i, k] * w[k, j] for k in range(4))
        result = feature_align(EmbeddingMatrix(x), AlignmentMap(w))
        np.testing.assert_allclose(result.data, expected, atol=1e-12)

    def test_linear_in_its_input(self):
        for seed in range(20):
            local = np.random.default_rng(400 + seed)
            alignment = AlignmentMap(local.normal(size=(5, 3)))
            x = local.normal(size=(6, 5))
            y = local.normal(size=(6, 5))
            a, b = local.normal(size=2)
            combined = feature_align(EmbeddingMatrix(a * x + b * y), alignment).data
            separate = (a * feature_align(EmbeddingMatrix(x), alignment).data
                        + b * feature_align(EmbeddingMatrix(y), alignment).data)
            np.testing.assert_allclose(combined, separate, atol=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            feature_align(EmbeddingMatrix(np.ones((2, 3))), AlignmentMap(np.ones((4, 2))))


@pytest.mark.unit
class TestRowNormalize:
    """Test L2 row normalisation"""

    def test_three_four_five(self):
        result, zero_rows = row_normalize(EmbeddingMatrix([[3.0, 4.0]]))
        np.testing.assert_allclose(result.data, [[0.6, 0.8]])
        assert zero_rows == []

    def test_zero_row_flagged(self):
        result, zero_rows = row_normalize(EmbeddingMatrix([[0.0, 0.0]]))
        assert result.data.tolist() == [[0.0, 0.0]]
        assert zero_rows == [0]

    def test_analytic_norms(self):
        result, _ = row_normalize(EmbeddingMatrix([[1.0, 1.0], [2.0, 0.0]]))
        s = 1 / np.sqrt(2)
        np.testing.assert_allclose(result.data, [[s, s], [1.0, 0.0]])

    def test_unit_rows(self, rng):
        result, _ = row_normalize(EmbeddingMatrix(rng.normal(size=(20, 6))))
        np.testing.assert_allclose(np.linalg.norm(result.data, axis=1), 1.0, atol=1e-12)

    def test_idempotent(self, rng):
        data = rng.normal(size=(30, 7))
        data[4] = 0.0
        once, _ = row_normalize(EmbeddingMatrix(data))
        twice, zero_rows = row_normalize(once)
        np.testing.assert_allclose(twice.data, once.data, atol=1e-9)
        assert zero_rows == [4]
