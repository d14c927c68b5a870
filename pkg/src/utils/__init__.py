"""
Utilities package - helper functions and configuration
"""
from .resources import configure_logging, thread_limit, ensure_directory_exists, ensure_parent_exists
from .config import (
    AppConfig, app_config, SelectionConfig, AttentionConfig, ClusterConfig,
    SweepConfig, RuntimeConfig
)

__all__ = [
    'configure_logging', 'thread_limit', 'ensure_directory_exists', 'ensure_parent_exists',
    'AppConfig', 'app_config', 'SelectionConfig', 'AttentionConfig', 'ClusterConfig',
    'SweepConfig', 'RuntimeConfig'
]
