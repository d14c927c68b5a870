"""
Core interfaces and abstract base classes for the Simignore toolkit.
These define the contracts that similarity metrics, selection strategies and
renderers must implement.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np


@dataclass
class MethodConfig:
    """Configuration for a pluggable method"""
    name: str
    parameters: Dict[str, Any]
    description: str = ""


@dataclass(frozen=True)
class SimilarityMatrix:
    """Image-by-text similarity scores; larger always means more similar"""
    data: np.ndarray = field(repr=False)
    metric: str

    @property
    def n_img(self) -> int:
        return self.data.shape[0]

    @property
    def n_usr(self) -> int:
        return self.data.shape[1]

    __hash__ = None


@dataclass(frozen=True)
class SimilaritySelection:
    """Outcome of a token selection together with its budget bookkeeping"""
    flat_indices: Tuple[int, ...]
    kept_image_indices: Tuple[int, ...]
    k_requested: int
    p_total: int
    strategy: str
    n_img: int
    scores: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def ignored_image_indices(self) -> Tuple[int, ...]:
        kept = set(self.kept_image_indices)
        return tuple(i for i in range(self.n_img) if i not in kept)


class ISimilarityMetric(ABC):
    """Interface for image/text similarity metrics"""

    @abstractmethod
    def get_metric_name(self) -> str:
        """Return the registry name of the metric"""
        pass

    @abstractmethod
    def get_description(self) -> str:
        """Return a description of the metric"""
        pass

    @abstractmethod
    def compute(self, img: np.ndarray, txt: np.ndarray) -> np.ndarray:
        """Return the (n_img, n_usr) score matrix, larger = more similar"""
        pass

    def get_default_config(self) -> MethodConfig:
        return MethodConfig(name=self.get_metric_name(), parameters={},
                            description=self.get_description())


class ISelectionStrategy(ABC):
    """Interface for turning a similarity matrix into kept image tokens"""

    @abstractmethod
    def get_strategy_name(self) -> str:
        """Return the registry name of the strategy"""
        pass

    @abstractmethod
    def get_description(self) -> str:
        """Return a description of the strategy"""
        pass

    @abstractmethod
    def select(self, similarity: SimilarityMatrix, keep_budget: int) -> SimilaritySelection:
        """Select at most ``keep_budget`` image tokens"""
        pass


class IGridRenderer(ABC):
    """Interface for heat-grid and scatter rendering"""

    @abstractmethod
    def render(self, grid: Any, output_path: str, **kwargs) -> str:
        """Render a heat grid and return the written path"""
        pass

    @abstractmethod
    def render_scatter(self, points: Any, output_path: str, labels: Optional[Any] = None,
                       highlight: Optional[Any] = None, extra_points: Optional[Any] = None,
                       **kwargs) -> str:
        """Render projected points, coloured by label, and return the written path"""
        pass

    @abstractmethod
    def get_supported_formats(self) -> List[str]:
        """Return supported output formats"""
        pass


class IPluginRegistry(ABC):
    """Interface for plugin management"""

    @abstractmethod
    def register_metric(self, metric: ISimilarityMetric) -> None:
        pass

    @abstractmethod
    def register_strategy(self, strategy: ISelectionStrategy) -> None:
        pass

    @abstractmethod
    def register_renderer(self, renderer: IGridRenderer) -> None:
        pass

    @abstractmethod
    def get_metric(self, name: str) -> ISimilarityMetric:
        pass

    @abstractmethod
    def get_strategy(self, name: str) -> ISelectionStrategy:
        pass

    @abstractmethod
    def get_renderers(self) -> List[IGridRenderer]:
        pass
