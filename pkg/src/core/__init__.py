"""
Core package initialization - imports and exports for the core functionality
"""
from .interfaces import (
    ISimilarityMetric, ISelectionStrategy, IGridRenderer, IPluginRegistry,
    SimilarityMatrix, SimilaritySelection, MethodConfig
)
from .token_space import (
    Segment, TokenSegmentation, EmbeddingMatrix, AttentionTensor,
    make_segmentation, segment_of
)
from .plugin_registry import plugin_registry, PluginRegistry
from .plugin_loader import plugin_loader, PluginLoader

__all__ = [
    'ISimilarityMetric', 'ISelectionStrategy', 'IGridRenderer', 'IPluginRegistry',
    'SimilarityMatrix', 'SimilaritySelection', 'MethodConfig',
    'Segment', 'TokenSegmentation', 'EmbeddingMatrix', 'AttentionTensor',
    'make_segmentation', 'segment_of',
    'plugin_registry', 'PluginRegistry', 'plugin_loader', 'PluginLoader'
]
