"""
Shape pipeline from an encoder feature map to text-aligned image embeddings.

The vision encoder itself is external: this module starts from its output
feature map (C', H', W'), pools it to ``n_img x I`` and projects it to the text
dimension ``T`` with a caller-supplied linear map.
"""
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from sklearn.preprocessing import normalize

from src.core.errors import DimensionMismatch, EmptyFeatureMap, NonFiniteValues, ShapeMismatch, ValidationError
from src.core.token_space import EmbeddingMatrix


@dataclass(frozen=True)
class FeatureMap:
    """Encoder output of shape (channels, height, width)"""
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        array = np.array(self.data, dtype=np.float64, copy=True)
        if array.ndim != 3:
            raise ShapeMismatch(f"feature map must be (C', H', W'), got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise NonFiniteValues("feature map contains NaN or Inf values")
        array.setflags(write=False)
        object.__setattr__(self, "data", array)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    __hash__ = None


@dataclass(frozen=True)
class AlignmentMap:
    """Linear projection from pooled image features (I) to text dimension (T)"""
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        array = np.array(self.weights, dtype=np.float64, copy=True)
        if array.ndim != 2:
            raise ShapeMismatch(f"alignment weights must be (I, T), got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise NonFiniteValues("alignment weights contain NaN or Inf values")
        array.setflags(write=False)
        object.__setattr__(self, "weights", array)

    @property
    def in_dim(self) -> int:
        return self.weights.shape[0]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[1]

    __hash__ = None


def _bin_edges(length: int, bins: int) -> np.ndarray:
    # bin k covers [floor(k*len/bins), floor((k+1)*len/bins)); bins past len reuse one cell
    k = np.arange(bins + 1)
    starts = (k[:-1] * length) // bins
    ends = np.maximum((k[1:] * length) // bins, starts + 1)
    return np.stack([starts, ends], axis=1)


def adaptive_pool(fm: FeatureMap, n_img: int, out_dim: int) -> EmbeddingMatrix:
    """
    Adaptive average pooling of a feature map to ``n_img x out_dim``.

    Spatial positions (H'·W', row-major) are partitioned into ``n_img`` bins and
    channels into ``out_dim`` bins; each output cell is the mean of its
    (spatial bin, channel bin) block.
    """
    if n_img < 1 or out_dim < 1:
        raise ValidationError(f"n_img and out_dim must be >= 1, got {n_img}, {out_dim}")
    if fm.data.size == 0:
        raise EmptyFeatureMap("feature map has no cells")

    # (positions, channels) with positions in row-major (h, w) order
    grid = fm.data.reshape(fm.channels, -1).T
    positions, channels = grid.shape
    pos_edges = _bin_edges(positions, n_img)
    ch_edges = _bin_edges(channels, out_dim)

    pooled = np.empty((n_img, out_dim), dtype=np.float64)
    for r, (p0, p1) in enumerate(pos_edges):
        for c, (c0, c1) in enumerate(ch_edges):
            block = grid[p0:p1, c0:c1]
            pooled[r, c] = block.mean()
    return EmbeddingMatrix(pooled)


def feature_align(x: EmbeddingMatrix, alignment: AlignmentMap) -> EmbeddingMatrix:
    """Project pooled features into the text embedding dimension"""
    if x.dim != alignment.in_dim:
        raise DimensionMismatch(
            f"feature dimension {x.dim} does not match alignment input {alignment.in_dim}"
        )
    return EmbeddingMatrix(x.data @ alignment.weights)


def row_normalize(m: EmbeddingMatrix) -> Tuple[EmbeddingMatrix, List[int]]:
    """
    L2-normalise every row.

    Zero-norm rows stay all-zero; their indices are returned alongside the
    result so callers can exclude degenerate tokens.
    """
    norms = np.linalg.norm(m.data, axis=1)
    zero_rows = [int(i) for i in np.flatnonzero(norms == 0.0)]
    if m.rows == 0:
        return m, zero_rows
    return EmbeddingMatrix(normalize(m.data, norm="l2", axis=1)), zero_rows
