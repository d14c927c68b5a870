"""
Flat top-K selection strategy: top-K entries of the flattened similarity
matrix, mapped back to image tokens and deduplicated.
"""
from src.core.interfaces import ISelectionStrategy, SimilarityMatrix, SimilaritySelection
from src.core.selection import (
    flatten, map_to_image_indices, max_over_text_scores, topk_flat_indices
)


class FlatTopKStrategy(ISelectionStrategy):
    """Literal flatten / argsort / floor-divide selection"""

    def get_strategy_name(self) -> str:
        return "flat-topk"

    def get_description(self) -> str:
        return ("Top-K of the flattened image-by-text matrix; several entries can "
                "map to the same image token, so fewer than K tokens may be kept.")

    def select(self, similarity: SimilarityMatrix, keep_budget: int) -> SimilaritySelection:
        flat_indices = []
        if keep_budget > 0:
            flat_indices = topk_flat_indices(flatten(similarity), keep_budget)
        kept = map_to_image_indices(flat_indices, similarity.n_usr, similarity.n_img)
        return SimilaritySelection(
            flat_indices=tuple(flat_indices),
            kept_image_indices=tuple(kept),
            k_requested=keep_budget,
            p_total=similarity.n_img * similarity.n_usr,
            strategy=self.get_strategy_name(),
            n_img=similarity.n_img,
            scores=max_over_text_scores(similarity),
        )
