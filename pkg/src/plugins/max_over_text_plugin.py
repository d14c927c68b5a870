"""
Max-over-text selection strategy: exactly K distinct image tokens ranked by
their best similarity to any text token.
"""
import numpy as np

from src.core.interfaces import ISelectionStrategy, SimilarityMatrix, SimilaritySelection
from src.core.selection import descending_order, max_over_text_scores


class MaxOverTextStrategy(ISelectionStrategy):
    """Rank image tokens by max_j S(i, j) and keep the best K"""

    def get_strategy_name(self) -> str:
        return "max-over-text"

    def get_description(self) -> str:
        return ("Scores each image token by its maximum similarity over the text "
                "tokens and keeps exactly K distinct tokens (ties by index).")

    def select(self, similarity: SimilarityMatrix, keep_budget: int) -> SimilaritySelection:
        scores = max_over_text_scores(similarity)
        kept = descending_order(scores)[:keep_budget]
        # flat index of each kept token's best text match (first on ties)
        best_text = np.argmax(similarity.data, axis=1)
        flat = tuple(int(i) * similarity.n_usr + int(best_text[i]) for i in kept)
        return SimilaritySelection(
            flat_indices=flat,
            kept_image_indices=tuple(int(i) for i in kept),
            k_requested=keep_budget,
            p_total=similarity.n_img * similarity.n_usr,
            strategy=self.get_strategy_name(),
            n_img=similarity.n_img,
            scores=scores,
        )
