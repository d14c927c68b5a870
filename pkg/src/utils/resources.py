"""
Utility functions for logging setup, thread limits and file operations.
"""
import contextlib
import logging
import os
import sys
from pathlib import Path
from typing import Iterator, Optional, Union

from threadpoolctl import threadpool_limits

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: Union[int, str] = "WARNING") -> None:
    """Install a single stderr handler on the root logger"""
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.WARNING
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_simignore", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._simignore = True
    root.addHandler(handler)
    root.setLevel(level)


@contextlib.contextmanager
def thread_limit(threads: Optional[int]) -> Iterator[None]:
    """Cap BLAS/OpenMP pools for the duration of the block"""
    if threads is None:
        yield
        return
    with threadpool_limits(limits=threads):
        yield


def ensure_directory_exists(directory_path: Union[str, Path]) -> None:
    """Ensure that a directory exists, create if it doesn't"""
    if directory_path and not os.path.exists(directory_path):
        os.makedirs(directory_path, exist_ok=True)


def ensure_parent_exists(file_path: Union[str, Path]) -> Path:
    """Create the parent directory of an output file"""
    path = Path(file_path)
    ensure_directory_exists(path.parent)
    return path
