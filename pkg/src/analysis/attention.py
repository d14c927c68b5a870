"""
Attention-flow analysis: segment-wise attention shares, the image-token
influence heat map and a simulated masked-attention pass.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from src.core.errors import (
    IndexOutOfRange, LengthMismatch, NotPerfectSquare, SegmentationMismatch, ValidationError
)
from src.core.selection import TokenMask
from src.core.token_space import AttentionTensor, TokenSegmentation
from src.utils.config import app_config

logger = logging.getLogger(__name__)

HeadAgg = Union[str, int]


@dataclass(frozen=True)
class InfluenceSummary:
    """Attention shares a query row gives to each segment"""
    sys_share: float
    img_share: float
    usr_share: float
    per_image_scores: np.ndarray = field(repr=False)

    __hash__ = None


@dataclass(frozen=True)
class HeatGrid:
    """Per-image-token attention reshaped to a square patch grid"""
    values: np.ndarray = field(repr=False)
    source_query: int
    head_agg: str

    @property
    def side(self) -> int:
        return self.values.shape[0]

    __hash__ = None


@dataclass(frozen=True)
class PassReport:
    """Bookkeeping of a simulated masked attention pass"""
    active_key_count: int
    multiply_accumulate_count: int
    renormalized_row_checksum: float
    degenerate_rows: Tuple[Tuple[int, int], ...] = ()


def unsequence(a: AttentionTensor) -> AttentionTensor:
    """Drop the batch dimension of a batch-1 tensor"""
    return AttentionTensor(a.head_rows())


def parse_head_agg(value: HeadAgg) -> HeadAgg:
    """Normalise a head aggregation spec: 'mean', 'max' or a head index"""
    if isinstance(value, (int, np.integer)):
        return int(value)
    text = str(value).strip().lower()
    if text in ("mean", "max"):
        return text
    try:
        return int(text)
    except ValueError:
        raise ValidationError(f"head aggregation must be mean, max or a head index, got {value!r}") from None


def resolve_query(a: AttentionTensor, query: Union[str, int]) -> int:
    """'last' selects the final (output) query row"""
    if isinstance(query, str):
        if query.strip().lower() == "last":
            return a.n_query - 1
        try:
            query = int(query)
        except ValueError:
            raise ValidationError(f"query must be 'last' or an integer, got {query!r}") from None
    if not 0 <= query < a.n_query:
        raise IndexOutOfRange(f"query {query} outside [0, {a.n_query})")
    return int(query)


def aggregate_query_row(a: AttentionTensor, query: Union[str, int], head_agg: HeadAgg = "mean") -> np.ndarray:
    """
    Collapse the heads of one query row.

    ``mean`` averages heads, ``max`` takes the element-wise maximum and
    re-normalises it to sum 1, an integer picks a single head as is.
    """
    rows = a.head_rows()
    q = resolve_query(a, query)
    agg = parse_head_agg(head_agg)
    if agg == "mean":
        return rows[:, q, :].mean(axis=0)
    if agg == "max":
        row = rows[:, q, :].max(axis=0)
        total = row.sum()
        return row / total if total > 0 else row
    if not 0 <= agg < a.heads:
        raise IndexOutOfRange(f"head {agg} outside [0, {a.heads})")
    return rows[agg, q, :].copy()


def segment_shares(a: AttentionTensor, seg: TokenSegmentation, query: Union[str, int] = "last",
                   head_agg: HeadAgg = "mean") -> InfluenceSummary:
    """Sum the aggregated query row over the system, image and user keys"""
    if a.n_key != seg.total():
        raise SegmentationMismatch(f"tensor has {a.n_key} keys, segmentation covers {seg.total()}")
    row = aggregate_query_row(a, query, head_agg)
    total = float(row.sum())
    if abs(total - 1.0) > app_config.attention.row_sum_tolerance:
        logger.warning("query row sums to %.6f, shares will not sum to 1", total)
    image = row[seg.n_sys:seg.n_sys + seg.n_img].copy()
    image.setflags(write=False)
    return InfluenceSummary(
        sys_share=float(row[:seg.n_sys].sum()),
        img_share=float(image.sum()),
        usr_share=float(row[seg.n_sys + seg.n_img:].sum()),
        per_image_scores=image,
    )


def grid_side(n_img: int) -> int:
    side = math.isqrt(n_img)
    if side * side != n_img:
        raise NotPerfectSquare(f"{n_img} image tokens cannot form a square grid")
    return side


def influence_heatmap(a: AttentionTensor, seg: TokenSegmentation, query: Union[str, int] = "last",
                      head_agg: HeadAgg = "mean") -> HeatGrid:
    """Reshape the query row's image-token attention into a sqrt(n_img) square grid"""
    side = grid_side(seg.n_img)
    summary = segment_shares(a, seg, query, head_agg)
    values = summary.per_image_scores.reshape(side, side).copy()
    values.setflags(write=False)
    agg = parse_head_agg(head_agg)
    label = agg if isinstance(agg, str) else f"head{agg}"
    return HeatGrid(values=values, source_query=resolve_query(a, query), head_agg=label)


def masked_mac_count(n_heads: int, n_query: int, active_keys: int, head_dim: int) -> int:
    """Multiply-accumulates of QK^T plus AV restricted to the surviving keys"""
    return 2 * n_heads * n_query * active_keys * head_dim


def simulate_masked_pass(a: AttentionTensor, mask: TokenMask, head_dim: int = None) -> PassReport:
    """
    Zero the masked key columns and re-normalise each query row over the
    surviving keys. Rows left without attention mass are reported rather than
    divided.
    """
    if len(mask) != a.n_key:
        raise LengthMismatch(f"mask length {len(mask)} != key count {a.n_key}")
    head_dim = app_config.attention.head_dim if head_dim is None else head_dim
    keep = mask.bits.astype(bool)
    mass = (a.head_rows() * keep).sum(axis=-1)
    degenerate = np.argwhere(mass <= 0.0)
    renormalized = renormalized_rows(a, mask)

    active = int(keep.sum())
    report = PassReport(
        active_key_count=active,
        multiply_accumulate_count=masked_mac_count(a.heads, a.n_query, active, head_dim),
        renormalized_row_checksum=float(renormalized.sum()),
        degenerate_rows=tuple((int(h), int(q)) for h, q in degenerate),
    )
    if report.degenerate_rows:
        logger.info("%d query rows lost all attention mass under the mask", len(report.degenerate_rows))
    return report


def renormalized_rows(a: AttentionTensor, mask: TokenMask) -> np.ndarray:
    """The re-normalised (heads, query, key) weights of a masked pass"""
    if len(mask) != a.n_key:
        raise LengthMismatch(f"mask length {len(mask)} != key count {a.n_key}")
    masked = a.head_rows() * mask.bits.astype(bool)
    mass = masked.sum(axis=-1, keepdims=True)
    return np.where(mass > 0.0, masked / np.where(mass > 0.0, mass, 1.0), 0.0)
