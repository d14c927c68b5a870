"""
Manhattan distance similarity plugin.
"""
import numpy as np
from scipy.spatial.distance import cdist

from src.core.interfaces import ISimilarityMetric


class ManhattanMetric(ISimilarityMetric):
    """Negated L1 distance between image and text embeddings"""

    def get_metric_name(self) -> str:
        """Return the name of the metric"""
        return "manhattan"

    def get_description(self) -> str:
        """Return a description of the metric"""
        return "Negated Manhattan distance; sensitive to embedding scale."

    def compute(self, img: np.ndarray, txt: np.ndarray) -> np.ndarray:
        distances = cdist(img, txt, metric="cityblock")
        return -distances
