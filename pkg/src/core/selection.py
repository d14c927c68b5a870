"""
Simignore token selection: image/text similarity, top-K selection of the most
text-relevant image tokens, importance bands and the spliced attention mask.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, List, Optional, Sequence

import numpy as np

from src.core.errors import (
    BudgetOutOfRange, DimensionMismatch, IndexOutOfRange, KOutOfRange, ValidationError
)
from src.core.interfaces import SimilarityMatrix, SimilaritySelection
from src.core.token_space import EmbeddingMatrix, TokenSegmentation

logger = logging.getLogger(__name__)


class Metric(str, Enum):
    COSINE = "cosine"
    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"


class Strategy(str, Enum):
    FLAT_TOPK = "flat-topk"
    MAX_OVER_TEXT = "max-over-text"


class Band(str, Enum):
    UNIMPORTANT = "unimportant"
    INTERMEDIATE = "intermediate"
    IMPORTANT = "important"
    RANDOM = "random"


def _registry():
    from src.core.plugin_loader import plugin_loader
    plugin_loader.ensure_loaded()
    return plugin_loader.registry


def similarity_matrix(img: EmbeddingMatrix, txt: EmbeddingMatrix, metric="cosine") -> SimilarityMatrix:
    """
    Score every (image token, text token) pair.

    Distances are negated so larger is more similar under every metric.
    """
    if img.dim != txt.dim:
        raise DimensionMismatch(f"image dim {img.dim} != text dim {txt.dim}")
    if img.rows == 0 or txt.rows == 0:
        raise ValidationError("similarity needs at least one image row and one text row")
    name = Metric(metric).value
    scores = _registry().get_metric(name).compute(img.data, txt.data)
    scores = np.ascontiguousarray(scores, dtype=np.float64)
    scores.setflags(write=False)
    return SimilarityMatrix(data=scores, metric=name)


def flatten(s: SimilarityMatrix) -> np.ndarray:
    """Row-major flattening; element p is (p // n_usr, p % n_usr)"""
    return s.data.reshape(-1).copy()


def descending_order(values: np.ndarray) -> np.ndarray:
    """Positions sorted by descending value, ties by ascending position"""
    return np.argsort(-np.asarray(values, dtype=np.float64), kind="stable")


def topk_flat_indices(flat: np.ndarray, k: int) -> List[int]:
    """The k largest positions, descending by value, ties by ascending position"""
    flat = np.asarray(flat)
    if not 1 <= k <= flat.size:
        raise KOutOfRange(f"k={k} outside [1, {flat.size}]")
    return [int(p) for p in descending_order(flat)[:k]]


def map_to_image_indices(flat_indices: Sequence[int], n_usr: int,
                         n_img: Optional[int] = None) -> List[int]:
    """Map flat indices to image tokens (p // n_usr), first occurrence wins"""
    if n_usr < 1:
        raise ValidationError("n_usr must be >= 1")
    limit = None if n_img is None else n_img * n_usr
    seen = set()
    kept = []
    for p in flat_indices:
        if p < 0 or (limit is not None and p >= limit):
            raise IndexOutOfRange(f"flat index {p} outside [0, {limit})")
        i = int(p) // n_usr
        if i not in seen:
            seen.add(i)
            kept.append(i)
    return kept


def max_over_text_scores(s: SimilarityMatrix) -> np.ndarray:
    """Importance of each image token: its best score against any text token"""
    return s.data.max(axis=1)


def _check_budget(value: int, n_img: int, what: str) -> None:
    if not 0 <= value <= n_img:
        raise BudgetOutOfRange(f"{what} {value} outside [0, {n_img}]")


def select_from_similarity(s: SimilarityMatrix, keep_budget: int,
                           strategy="max-over-text") -> SimilaritySelection:
    """Apply a registered selection strategy to a precomputed matrix"""
    _check_budget(keep_budget, s.n_img, "keep budget")
    name = Strategy(strategy).value
    return _registry().get_strategy(name).select(s, keep_budget)


def select_tokens(img: EmbeddingMatrix, txt: EmbeddingMatrix, metric="cosine",
                  keep_budget: int = 0, strategy="max-over-text") -> SimilaritySelection:
    """Keep the ``keep_budget`` image tokens most similar to the text"""
    _check_budget(keep_budget, img.rows, "keep budget")
    s = similarity_matrix(img, txt, metric)
    selection = select_from_similarity(s, keep_budget, strategy)
    logger.debug("selected %d of %d image tokens (%s, %s)",
                 len(selection.kept_image_indices), s.n_img, s.metric, selection.strategy)
    return selection


def _band_ignored(order: np.ndarray, band: Band, ignore_count: int, seed: int) -> np.ndarray:
    n = order.size
    if ignore_count == 0:
        return order[:0]
    if band is Band.IMPORTANT:
        return order[:ignore_count]
    if band is Band.UNIMPORTANT:
        return order[n - ignore_count:]
    if band is Band.INTERMEDIATE:
        start = (n - ignore_count) // 2
        return order[start:start + ignore_count]
    rng = np.random.default_rng(seed)
    return rng.choice(n, size=ignore_count, replace=False)


def importance_band_selection(img: EmbeddingMatrix, txt: EmbeddingMatrix, metric="cosine",
                              band="unimportant", ignore_count: int = 0,
                              seed: int = 0) -> SimilaritySelection:
    """
    Ignore a band of image tokens ranked by their best similarity to the text.

    ``important`` drops the top of the ranking, ``unimportant`` the bottom,
    ``intermediate`` a centred contiguous band, ``random`` a seeded uniform
    sample. Kept tokens are reported in ranking order.
    """
    _check_budget(ignore_count, img.rows, "ignore count")
    s = similarity_matrix(img, txt, metric)
    return band_selection_from_similarity(s, band, ignore_count, seed)


def band_selection_from_similarity(s: SimilarityMatrix, band, ignore_count: int,
                                   seed: int = 0) -> SimilaritySelection:
    _check_budget(ignore_count, s.n_img, "ignore count")
    band = Band(band)
    scores = max_over_text_scores(s)
    order = descending_order(scores)
    ignored = set(int(i) for i in _band_ignored(order, band, ignore_count, seed))
    kept = tuple(int(i) for i in order if int(i) not in ignored)
    return SimilaritySelection(
        flat_indices=(),
        kept_image_indices=kept,
        k_requested=s.n_img - ignore_count,
        p_total=s.n_img * s.n_usr,
        strategy=f"band:{band.value}",
        n_img=s.n_img,
        scores=scores,
    )


def random_band_trials(img: EmbeddingMatrix, txt: EmbeddingMatrix, metric="cosine",
                       ignore_count: int = 0, seed: int = 0,
                       trials: int = 10) -> Iterator[SimilaritySelection]:
    """Repeated random-band selections drawn from seeds seed, seed+1, ..."""
    return random_trials_from_similarity(similarity_matrix(img, txt, metric), ignore_count, seed, trials)


def random_trials_from_similarity(s: SimilarityMatrix, ignore_count: int, seed: int = 0,
                                  trials: int = 10) -> Iterator[SimilaritySelection]:
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    _check_budget(ignore_count, s.n_img, "ignore count")
    return (band_selection_from_similarity(s, Band.RANDOM, ignore_count, seed + t) for t in range(trials))


@dataclass(frozen=True)
class TokenMask:
    """Binary attention mask over the full token sequence"""
    seg: TokenSegmentation
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        bits = np.array(self.bits, dtype=np.uint8, copy=True)
        if bits.shape != (self.seg.total(),):
            raise ValidationError(f"mask length {bits.size} != sequence length {self.seg.total()}")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def popcount(self) -> int:
        return int(self.bits.sum())

    def ignored_count(self) -> int:
        return self.seg.total() - self.popcount()

    def kept_image_indices(self) -> List[int]:
        image = self.bits[self.seg.n_sys:self.seg.n_sys + self.seg.n_img]
        return [int(i) for i in np.flatnonzero(image)]

    def __len__(self) -> int:
        return self.bits.size

    __hash__ = None


def build_mask(seg: TokenSegmentation, kept_image_indices: Sequence[int]) -> TokenMask:
    """Splice all-ones system and user masks around the image keep mask"""
    bits = np.ones(seg.total(), dtype=np.uint8)
    image = np.zeros(seg.n_img, dtype=np.uint8)
    for i in kept_image_indices:
        if not 0 <= i < seg.n_img:
            raise IndexOutOfRange(f"image index {i} outside [0, {seg.n_img})")
        image[i] = 1
    bits[seg.n_sys:seg.n_sys + seg.n_img] = image
    return TokenMask(seg=seg, bits=bits)


def keep_from_ignore(n_img: int, ignore: int) -> int:
    """Convert an ignored count into the equivalent keep budget"""
    _check_budget(ignore, n_img, "ignore count")
    return n_img - ignore
