"""
Token-sequence partition and the validated tensors shared by every other module.

All indices are 0-based. The image segment of a sequence with ``n_sys`` system
tokens and ``n_img`` image tokens is the half-open range
``[n_sys, n_sys + n_img)``; for the LLaVA-1.5 layout (35 system tokens, 576
image tokens) that is ``[35, 611)``.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from src.core.errors import (
    BatchNotOne, IndexOutOfRange, NonFiniteValues, ShapeMismatch,
    ValidationError, ZeroImageTokens, ZeroUserTokens
)


class Segment(str, Enum):
    """Label of the segment a token position belongs to"""
    SYSTEM = "System"
    IMAGE = "Image"
    USER = "User"


@dataclass(frozen=True)
class TokenSegmentation:
    """(system, image, user) partition of a token sequence"""
    n_sys: int
    n_img: int
    n_usr: int

    def total(self) -> int:
        return self.n_sys + self.n_img + self.n_usr

    @property
    def system_range(self) -> range:
        return range(0, self.n_sys)

    @property
    def image_range(self) -> range:
        return range(self.n_sys, self.n_sys + self.n_img)

    @property
    def user_range(self) -> range:
        return range(self.n_sys + self.n_img, self.total())

    def ranges(self) -> Tuple[range, range, range]:
        return self.system_range, self.image_range, self.user_range


def make_segmentation(n_sys: int, n_img: int, n_usr: int) -> TokenSegmentation:
    """Build a segmentation, rejecting empty image or user populations"""
    for name, value in (("n_sys", n_sys), ("n_img", n_img), ("n_usr", n_usr)):
        if int(value) != value or value < 0:
            raise ValidationError(f"{name} must be a non-negative integer, got {value!r}")
    if n_img < 1:
        raise ZeroImageTokens("segmentation needs at least one image token")
    if n_usr < 1:
        raise ZeroUserTokens("segmentation needs at least one user token")
    return TokenSegmentation(int(n_sys), int(n_img), int(n_usr))


def segment_of(seg: TokenSegmentation, index: int) -> Segment:
    """Return the segment whose range contains ``index``"""
    if not 0 <= index < seg.total():
        raise IndexOutOfRange(f"token index {index} outside [0, {seg.total()})")
    if index < seg.n_sys:
        return Segment.SYSTEM
    if index < seg.n_sys + seg.n_img:
        return Segment.IMAGE
    return Segment.USER


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    array = np.array(values, dtype=np.float64, copy=True)
    if array.ndim != ndim:
        raise ShapeMismatch(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise NonFiniteValues(f"{name} contains NaN or Inf values")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Rows of token embeddings sharing one feature dimension"""
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen_array(self.data, 2, "embedding matrix"))

    @classmethod
    def from_flat(cls, rows: int, dim: int, values) -> "EmbeddingMatrix":
        flat = np.asarray(values, dtype=np.float64).ravel()
        if flat.size != rows * dim:
            raise ShapeMismatch(f"expected {rows * dim} values for {rows}x{dim}, got {flat.size}")
        return cls(flat.reshape(rows, dim))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other) -> bool:
        return isinstance(other, EmbeddingMatrix) and np.array_equal(self.data, other.data)

    __hash__ = None


@dataclass(frozen=True)
class AttentionTensor:
    """
    Attention weights in [0, 1].

    ``data`` is (batch, heads, query, key) as exported from a model, or
    (heads, query, key) once the batch dimension has been removed by
    :func:`unsequence`.
    """
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        array = np.array(self.data, dtype=np.float64, copy=True)
        if array.ndim not in (3, 4):
            raise ShapeMismatch(f"attention tensor must be 3- or 4-dimensional, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise NonFiniteValues("attention tensor contains NaN or Inf values")
        if array.size and (array.min() < 0.0 or array.max() > 1.0):
            raise ValidationError("attention weights must lie in [0, 1]")
        array.setflags(write=False)
        object.__setattr__(self, "data", array)

    @property
    def batch(self) -> Optional[int]:
        return self.data.shape[0] if self.data.ndim == 4 else None

    @property
    def heads(self) -> int:
        return self.data.shape[-3]

    @property
    def n_query(self) -> int:
        return self.data.shape[-2]

    @property
    def n_key(self) -> int:
        return self.data.shape[-1]

    @property
    def is_unsequenced(self) -> bool:
        return self.data.ndim == 3

    def head_rows(self) -> np.ndarray:
        """(heads, query, key) view; requires batch 1 when a batch axis exists"""
        if self.data.ndim == 3:
            return self.data
        if self.data.shape[0] != 1:
            raise BatchNotOne(f"expected batch size 1, got {self.data.shape[0]}")
        return self.data[0]

    __hash__ = None
