"""
Plugin loader for automatic plugin discovery and registration.
"""
import importlib
import logging
from typing import List, Set

from src.core.interfaces import ISimilarityMetric, ISelectionStrategy, IGridRenderer
from src.core.plugin_registry import plugin_registry

logger = logging.getLogger(__name__)


class PluginLoader:
    """Automatic plugin discovery and loading"""

    def __init__(self, registry=plugin_registry):
        self.registry = registry
        self.loaded_plugins: Set[str] = set()

    def load_all_plugins(self) -> None:
        """Load all available plugins"""
        self._load_core_plugins()
        self._load_adapter_plugins()

    def ensure_loaded(self) -> None:
        """Load the core plugins once"""
        if not self.loaded_plugins:
            self.load_all_plugins()

    def _load_core_plugins(self) -> None:
        """Load the similarity metrics and selection strategies"""
        from src.plugins.cosine_plugin import CosineMetric
        from src.plugins.euclidean_plugin import EuclideanMetric
        from src.plugins.manhattan_plugin import ManhattanMetric
        from src.plugins.flat_topk_plugin import FlatTopKStrategy
        from src.plugins.max_over_text_plugin import MaxOverTextStrategy

        for metric in (CosineMetric(), EuclideanMetric(), ManhattanMetric()):
            self.registry.register_metric(metric)
            self.loaded_plugins.add(metric.__class__.__name__)
        for strategy in (FlatTopKStrategy(), MaxOverTextStrategy()):
            self.registry.register_strategy(strategy)
            self.loaded_plugins.add(strategy.__class__.__name__)

    def _load_adapter_plugins(self) -> None:
        """Load renderers; matplotlib is optional at runtime"""
        try:
            from src.adapters.matplotlib_adapter import MatplotlibGridRenderer
            self.registry.register_renderer(MatplotlibGridRenderer())
            self.loaded_plugins.add("MatplotlibGridRenderer")
        except ImportError as e:
            logger.warning("Failed to load Matplotlib adapter: %s", e)

    def get_loaded_plugins(self) -> List[str]:
        """Get list of successfully loaded plugins"""
        return sorted(self.loaded_plugins)

    def load_external_plugin(self, plugin_module_path: str) -> None:
        """Load an external plugin from a module path"""
        module = importlib.import_module(plugin_module_path)
        for attr_name in dir(module):
            attr = getattr(module, attr_name)
            if not isinstance(attr, type):
                continue
            if issubclass(attr, ISimilarityMetric) and attr is not ISimilarityMetric:
                self.registry.register_metric(attr())
                self.loaded_plugins.add(attr_name)
            elif issubclass(attr, ISelectionStrategy) and attr is not ISelectionStrategy:
                self.registry.register_strategy(attr())
                self.loaded_plugins.add(attr_name)
            elif issubclass(attr, IGridRenderer) and attr is not IGridRenderer:
                self.registry.register_renderer(attr())
                self.loaded_plugins.add(attr_name)
        logger.info("Loaded external plugin: %s", plugin_module_path)


# Global plugin loader instance
plugin_loader = PluginLoader()
