"""
Plugin registry implementation for metrics, selection strategies and renderers.
"""
import logging
from typing import Dict, List

from src.core.errors import UnknownPlugin
from src.core.interfaces import (
    IPluginRegistry, ISimilarityMetric, ISelectionStrategy, IGridRenderer
)

logger = logging.getLogger(__name__)


class PluginRegistry(IPluginRegistry):
    """Central registry for all plugins"""

    def __init__(self):
        self._metrics: Dict[str, ISimilarityMetric] = {}
        self._strategies: Dict[str, ISelectionStrategy] = {}
        self._renderers: List[IGridRenderer] = []

    def register_metric(self, metric: ISimilarityMetric) -> None:
        """Register a similarity metric plugin"""
        name = metric.get_metric_name()
        self._metrics[name] = metric
        logger.info("Registered metric: %s", name)

    def register_strategy(self, strategy: ISelectionStrategy) -> None:
        """Register a selection strategy plugin"""
        name = strategy.get_strategy_name()
        self._strategies[name] = strategy
        logger.info("Registered strategy: %s", name)

    def register_renderer(self, renderer: IGridRenderer) -> None:
        """Register a grid renderer plugin"""
        self._renderers.append(renderer)
        logger.info("Registered renderer: %s", renderer.__class__.__name__)

    def get_metric(self, name: str) -> ISimilarityMetric:
        try:
            return self._metrics[name]
        except KeyError:
            raise UnknownPlugin(
                f"unknown metric '{name}' (known: {', '.join(sorted(self._metrics))})"
            ) from None

    def get_strategy(self, name: str) -> ISelectionStrategy:
        try:
            return self._strategies[name]
        except KeyError:
            raise UnknownPlugin(
                f"unknown strategy '{name}' (known: {', '.join(sorted(self._strategies))})"
            ) from None

    def get_renderers(self) -> List[IGridRenderer]:
        return self._renderers.copy()

    def get_metric_names(self) -> List[str]:
        return list(self._metrics.keys())

    def get_strategy_names(self) -> List[str]:
        return list(self._strategies.keys())

    def find_renderer(self, fmt: str):
        """Find a renderer supporting the given output format"""
        for renderer in self._renderers:
            if fmt.lower() in renderer.get_supported_formats():
                return renderer
        return None


# Global plugin registry instance
plugin_registry = PluginRegistry()
