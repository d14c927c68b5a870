"""
Cosine similarity metric plugin.
"""
import numpy as np
from sklearn.preprocessing import normalize

from src.core.interfaces import ISimilarityMetric


class CosineMetric(ISimilarityMetric):
    """Dot product of L2-normalised rows; zero rows score 0 against everything"""

    def get_metric_name(self) -> str:
        """Return the name of the metric"""
        return "cosine"

    def get_description(self) -> str:
        """Return a description of the metric"""
        return ("Cosine similarity in the shared metric space; invariant to the "
                "scale of individual image or text embeddings.")

    def compute(self, img: np.ndarray, txt: np.ndarray) -> np.ndarray:
        img_norm = normalize(img, norm="l2", axis=1)
        txt_norm = normalize(txt, norm="l2", axis=1)
        scores = img_norm @ txt_norm.T
        # rounding can push unit dot products a hair past 1
        return np.clip(scores, -1.0, 1.0)
