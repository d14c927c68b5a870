"""
Embedding cluster study: 2-D PCA projection of token embeddings, seeded
k-means, cluster-ignore masks, overlap reporting and the critical-count search.
"""
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Iterator, List, Sequence, Tuple

import numpy as np
from sklearn.cluster import kmeans_plusplus
from sklearn.preprocessing import normalize

from src.core.errors import (
    ClusterIdOutOfRange, DegenerateCovariance, DimensionMismatch, IndexOutOfRange,
    KOutOfRange, NonMonotonePredicate, ValidationError
)
from src.core.token_space import EmbeddingMatrix
from src.utils.config import app_config

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    CORRECT = "Correct"
    INCORRECT = "Incorrect"


@dataclass(frozen=True)
class Projection2D:
    """Embedding rows projected onto their top two principal axes"""
    points: np.ndarray = field(repr=False)
    basis: np.ndarray = field(repr=False)
    mean: np.ndarray = field(repr=False)
    explained_variance: Tuple[float, float] = (0.0, 0.0)

    def transform(self, data: np.ndarray) -> np.ndarray:
        return (np.asarray(data, dtype=np.float64) - self.mean) @ self.basis.T

    def __len__(self) -> int:
        return self.points.shape[0]

    __hash__ = None


@dataclass(frozen=True)
class JointProjection:
    """Image and text embeddings in one shared 2-D cosine metric space"""
    image_points: np.ndarray = field(repr=False)
    text_points: np.ndarray = field(repr=False)
    projection: Projection2D = field(repr=False)

    __hash__ = None


@dataclass(frozen=True)
class ClusterAssignment:
    """Result of a seeded k-means run"""
    k: int
    labels: np.ndarray = field(repr=False)
    centroids: np.ndarray = field(repr=False)
    inertia: float
    iterations: int
    seed: int
    inertia_history: Tuple[float, ...] = field(default=(), repr=False)

    def sizes(self) -> List[int]:
        return [int(n) for n in np.bincount(self.labels, minlength=self.k)]

    __hash__ = None


def _start_vectors(cov: np.ndarray) -> List[np.ndarray]:
    """Fixed start vectors: uniform, an alternating-sign ramp, the largest-variance coordinate"""
    dim = cov.shape[0]
    ramp = np.arange(1, dim + 1, dtype=np.float64) * np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)
    coordinate = np.zeros(dim)
    coordinate[int(np.argmax(np.diag(cov)))] = 1.0
    return [np.ones(dim) / np.sqrt(dim), ramp / np.linalg.norm(ramp), coordinate]


def _power_iteration(cov: np.ndarray, vector: np.ndarray, max_iter: int, tol: float) -> Tuple[np.ndarray, float]:
    if np.linalg.norm(cov @ vector) == 0.0:
        return vector, 0.0
    eigenvalue = 0.0
    for _ in range(max_iter):
        product = cov @ vector
        norm = np.linalg.norm(product)
        if norm == 0.0:
            return vector, 0.0
        updated = product / norm
        eigenvalue = float(updated @ cov @ updated)
        if min(np.linalg.norm(updated - vector), np.linalg.norm(updated + vector)) < tol:
            vector = updated
            break
        vector = updated
    return vector, eigenvalue


def _principal_axis(cov: np.ndarray, max_iter: int, tol: float) -> Tuple[np.ndarray, float]:
    """
    Dominant eigenpair by power iteration.

    A start vector that is itself an eigenvector never leaves it, so every
    fixed start is tried and the largest Rayleigh quotient wins; earlier
    starts win ties.
    """
    best_vector, best_value = None, -np.inf
    for start in _start_vectors(cov):
        vector, value = _power_iteration(cov, start, max_iter, tol)
        if best_vector is None or value > best_value + tol * max(1.0, abs(best_value)):
            best_vector, best_value = vector, value
    return best_vector, best_value


def _orient(axis: np.ndarray) -> np.ndarray:
    # largest-magnitude component positive
    return axis if axis[int(np.argmax(np.abs(axis)))] >= 0 else -axis


def _pca_basis(data: np.ndarray, max_iter: int, tol: float) -> Tuple[np.ndarray, np.ndarray, Tuple[float, float]]:
    if not np.any(np.ptp(data, axis=0) > 0.0):
        raise DegenerateCovariance("embedding rows have zero variance in every direction")
    mean = data.mean(axis=0)
    centered = data - mean
    cov = centered.T @ centered / (data.shape[0] - 1)

    first, value1 = _principal_axis(cov, max_iter, tol)
    first = _orient(first)
    deflated = cov - value1 * np.outer(first, first)
    second, _ = _principal_axis(deflated, max_iter, tol)

    # keep the basis orthonormal even when deflation leaves a near-zero matrix
    second = second - (second @ first) * first
    if np.linalg.norm(second) < 1e-12:
        second = np.zeros_like(first)
        second[int(np.argmin(np.abs(first)))] = 1.0
        second = second - (second @ first) * first
    second = _orient(second / np.linalg.norm(second))
    value1 = float(first @ cov @ first)
    value2 = float(second @ cov @ second)
    if value2 > value1:
        first, second, value1, value2 = second, first, value2, value1
    return np.vstack([first, second]), mean, (max(value1, 0.0), max(value2, 0.0))


def project_2d(emb: EmbeddingMatrix, max_iter: int = None, tol: float = None) -> Projection2D:
    """
    Centre the rows and project them onto the top two principal axes.

    Axes come from power iteration with deflation on the sample covariance,
    each oriented so its largest-magnitude component is positive.
    """
    if emb.rows < 2 or emb.dim < 2:
        raise ValidationError(f"projection needs at least 2 rows and 2 dims, got {emb.rows}x{emb.dim}")
    cfg = app_config.clusters
    basis, mean, variance = _pca_basis(
        emb.data,
        cfg.pca_max_iter if max_iter is None else max_iter,
        cfg.pca_tol if tol is None else tol,
    )
    points = (emb.data - mean) @ basis.T
    return Projection2D(points=points, basis=basis, mean=mean, explained_variance=variance)


def project_joint(img: EmbeddingMatrix, txt: EmbeddingMatrix) -> JointProjection:
    """L2-normalise both populations and project them with one shared basis"""
    if img.dim != txt.dim:
        raise DimensionMismatch(f"image dim {img.dim} != text dim {txt.dim}")
    union = np.vstack([normalize(img.data, norm="l2", axis=1),
                       normalize(txt.data, norm="l2", axis=1)])
    projection = project_2d(EmbeddingMatrix(union))
    return JointProjection(
        image_points=projection.points[:img.rows],
        text_points=projection.points[img.rows:],
        projection=projection,
    )


def _nearest(points: np.ndarray, centroids: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    distances = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    # argmin returns the lowest centroid id on ties
    labels = np.argmin(distances, axis=1)
    return labels, distances[np.arange(points.shape[0]), labels]


def _as_points(points) -> np.ndarray:
    if isinstance(points, Projection2D):
        return points.points
    if isinstance(points, EmbeddingMatrix):
        return points.data
    return np.asarray(points, dtype=np.float64)


def kmeans(points, k: int = None, seed: int = 0, max_iter: int = None) -> ClusterAssignment:
    """
    Seeded k-means with k-means++ initialisation.

    Lloyd iterations run until the labels stop changing or ``max_iter`` is
    reached. A cluster that loses all its points is re-seeded at the point
    farthest from its current centroid.
    """
    data = _as_points(points)
    n = data.shape[0]
    k = app_config.clusters.default_k if k is None else k
    max_iter = app_config.clusters.max_iter if max_iter is None else max_iter
    if not 1 <= k <= n:
        raise KOutOfRange(f"k={k} outside [1, {n}]")

    centroids, _ = kmeans_plusplus(data, n_clusters=k, random_state=seed)
    centroids = centroids.astype(np.float64)
    labels, sq = _nearest(data, centroids)
    history = [float(sq.sum())]
    iterations = 0
    for iterations in range(1, max_iter + 1):
        updated = centroids.copy()
        for c in range(k):
            members = data[labels == c]
            if members.shape[0]:
                updated[c] = members.mean(axis=0)
        # re-seed empty clusters at the farthest points
        for c in range(k):
            if not np.any(labels == c):
                _, sq_now = _nearest(data, updated)
                updated[c] = data[int(np.argmax(sq_now))]
                logger.debug("re-seeded empty cluster %d", c)
        new_labels, sq = _nearest(data, updated)
        centroids = updated
        history.append(float(sq.sum()))
        if np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels

    labels.setflags(write=False)
    centroids.setflags(write=False)
    return ClusterAssignment(
        k=k,
        labels=labels,
        centroids=centroids,
        inertia=history[-1],
        iterations=iterations,
        seed=seed,
        inertia_history=tuple(history),
    )


def cluster_ignore_selection(assign: ClusterAssignment, ignore_clusters: Iterable[int]) -> List[int]:
    """Indices of every point whose cluster is not ignored"""
    ignore = set()
    for c in ignore_clusters:
        if not 0 <= c < assign.k:
            raise ClusterIdOutOfRange(f"cluster id {c} outside [0, {assign.k})")
        ignore.add(int(c))
    return [i for i, label in enumerate(assign.labels) if int(label) not in ignore]


def cluster_combinations(k: int, size: int) -> Iterator[Tuple[int, ...]]:
    """Ignore sets of ``size`` clusters in lexicographic order"""
    if not 0 <= size <= k:
        raise ValidationError(f"combination size {size} outside [0, {k}]")
    return itertools.combinations(range(k), size)


def overlap_report(ignored_by_similarity: Iterable[int], assign: ClusterAssignment) -> List[int]:
    """How many of the ignored tokens fall in each cluster"""
    counts = [0] * assign.k
    n = assign.labels.shape[0]
    for i in set(int(i) for i in ignored_by_similarity):
        if not 0 <= i < n:
            raise IndexOutOfRange(f"token index {i} outside [0, {n})")
        counts[int(assign.labels[i])] += 1
    return counts


def _is_correct(verdict) -> bool:
    if isinstance(verdict, bool):
        return verdict
    return Verdict(verdict) is Verdict.CORRECT


def critical_count_search(ordered_ignore_list: Sequence[int],
                          verdict: Callable[[int], object]) -> int:
    """
    Smallest prefix length m of ``ordered_ignore_list`` whose ignoring makes
    ``verdict(m)`` Correct.

    The predicate must be monotone in m. The full-length endpoint is evaluated
    first and must be Correct; the empty prefix is reached by the bisection
    itself, so the search costs 1 + ceil(log2(n + 1)) predicate calls.
    """
    n = len(ordered_ignore_list)
    if not _is_correct(verdict(n)):
        raise NonMonotonePredicate(
            f"predicate is Incorrect after ignoring all {n} tokens; no critical count exists"
        )
    lo, hi = -1, n  # verdict(hi) Correct; lo is a virtual Incorrect below 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _is_correct(verdict(mid)):
            hi = mid
        else:
            lo = mid
    logger.info("critical count %d of %d", hi, n)
    return hi
