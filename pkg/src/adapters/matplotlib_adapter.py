"""
Adapter for matplotlib heat-map and scatter rendering.
"""
import os
from typing import List, Optional

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from src.core.interfaces import IGridRenderer


class MatplotlibGridRenderer(IGridRenderer):
    """Adapter for rendering influence heat grids and cluster scatters"""

    def render(self, grid, output_path: str, **kwargs) -> str:
        """Render a HeatGrid, optionally blended over a background image"""
        figsize = kwargs.get('figsize', (6, 6))
        dpi = kwargs.get('dpi', 100)
        cmap = kwargs.get('cmap', 'jet')
        background: Optional[np.ndarray] = kwargs.get('background')
        alpha = kwargs.get('alpha', 0.5 if background is not None else 1.0)

        fig = plt.figure(figsize=figsize, dpi=dpi)
        try:
            axes = fig.add_subplot(1, 1, 1)
            extent = None
            if background is not None:
                axes.imshow(background)
                extent = (0, background.shape[1], background.shape[0], 0)
            image = axes.imshow(grid.values, cmap=cmap, alpha=alpha,
                                interpolation='nearest', extent=extent)
            fig.colorbar(image, ax=axes)
            axes.set_title(f"query {grid.source_query}, heads: {grid.head_agg}")
            axes.set_axis_off()
            self._save(fig, output_path, dpi)
        finally:
            plt.close(fig)
        return output_path

    def render_scatter(self, points: np.ndarray, output_path: str,
                       labels: Optional[np.ndarray] = None,
                       highlight: Optional[np.ndarray] = None,
                       extra_points: Optional[np.ndarray] = None, **kwargs) -> str:
        """Scatter of projected tokens; highlighted points drawn in red on top"""
        figsize = kwargs.get('figsize', (8, 6))
        dpi = kwargs.get('dpi', 100)

        fig = plt.figure(figsize=figsize, dpi=dpi)
        try:
            axes = fig.add_subplot(1, 1, 1)
            if labels is not None:
                for label in np.unique(labels):
                    members = points[labels == label]
                    axes.scatter(members[:, 0], members[:, 1], s=8, label=f"cluster{label}")
            else:
                axes.scatter(points[:, 0], points[:, 1], s=8, label="image tokens")
            if extra_points is not None and len(extra_points):
                axes.scatter(extra_points[:, 0], extra_points[:, 1], s=14, marker='^',
                             label="text tokens")
            if highlight is not None and np.any(highlight):
                chosen = points[np.asarray(highlight, dtype=bool)]
                axes.scatter(chosen[:, 0], chosen[:, 1], s=8, c='red', label="ignored")
            axes.legend(loc='best', fontsize='small')
            self._save(fig, output_path, dpi)
        finally:
            plt.close(fig)
        return output_path

    def _save(self, fig, output_path: str, dpi: int) -> None:
        directory = os.path.dirname(output_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        fig.savefig(output_path, format='png', dpi=dpi, bbox_inches='tight')

    def get_supported_formats(self) -> List[str]:
        """Return supported output formats"""
        return ['png']
