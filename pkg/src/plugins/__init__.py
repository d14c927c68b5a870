"""
Plugin initialization and registration.
"""
from .cosine_plugin import CosineMetric
from .euclidean_plugin import EuclideanMetric
from .manhattan_plugin import ManhattanMetric
from .flat_topk_plugin import FlatTopKStrategy
from .max_over_text_plugin import MaxOverTextStrategy
__all__ = [
    'CosineMetric',
    'EuclideanMetric',
    'ManhattanMetric',
    'FlatTopKStrategy',
    'MaxOverTextStrategy'
]
