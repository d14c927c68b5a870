"""
Application configuration and constants.
"""
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional, Tuple

from src.core.errors import ConfigurationError

THREADS_ENV = "SIMIGNORE_THREADS"
LOG_LEVEL_ENV = "SIMIGNORE_LOG_LEVEL"


@dataclass
class SelectionConfig:
    """Selection defaults"""
    default_metric: str = "cosine"
    default_strategy: str = "max-over-text"
    metrics: Tuple[str, ...] = ("cosine", "euclidean", "manhattan")
    strategies: Tuple[str, ...] = ("flat-topk", "max-over-text")
    bands: Tuple[str, ...] = ("unimportant", "intermediate", "important", "random")
    default_trials: int = 1


@dataclass
class AttentionConfig:
    """Attention analysis defaults"""
    default_head_agg: str = "mean"
    default_query: str = "last"
    # LLaVA-1.5-7B: 4096 hidden / 32 heads
    head_dim: int = 128
    row_sum_tolerance: float = 1e-4
    pgm_max_value: int = 255


@dataclass
class ClusterConfig:
    """Projection and k-means defaults"""
    default_k: int = 5
    max_iter: int = 300
    pca_max_iter: int = 1000
    pca_tol: float = 1e-9
    default_mode: str = "2d"


@dataclass
class SweepConfig:
    """Ignore-count sweep defaults"""
    default_ignore_list: Tuple[int, ...] = (72, 124, 144, 216, 288, 360, 432, 504, 576)


@dataclass
class RuntimeConfig:
    """Process-level settings read from the environment"""
    threads: Optional[int] = None
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "RuntimeConfig":
        environ = os.environ if environ is None else environ
        threads = None
        raw = environ.get(THREADS_ENV)
        if raw not in (None, ""):
            try:
                threads = int(raw)
            except ValueError:
                raise ConfigurationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
            if threads < 1:
                raise ConfigurationError(f"{THREADS_ENV} must be >= 1, got {threads}")
        log_level = environ.get(LOG_LEVEL_ENV, "WARNING").upper()
        return cls(threads=threads, log_level=log_level)


class AppConfig:
    """Main application configuration"""

    def __init__(self, runtime: Optional[RuntimeConfig] = None):
        self.selection = SelectionConfig()
        self.attention = AttentionConfig()
        self.clusters = ClusterConfig()
        self.sweep = SweepConfig()
        self.runtime = runtime if runtime is not None else RuntimeConfig()

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "AppConfig":
        return cls(runtime=RuntimeConfig.from_env(environ))

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary"""
        return {
            'selection': self.selection.__dict__,
            'attention': self.attention.__dict__,
            'clusters': self.clusters.__dict__,
            'sweep': self.sweep.__dict__,
            'runtime': self.runtime.__dict__,
        }


# Global configuration instance
app_config = AppConfig()
