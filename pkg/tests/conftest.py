"""
Pytest configuration and shared fixtures for all tests
"""
import json
import os
import shutil
import sys
import tempfile
from pathlib import Path
from typing import Callable, Generator, Optional

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.adapters.tensor_file import write_tensor
from src.core.plugin_loader import plugin_loader
from src.core.plugin_registry import plugin_registry
from src.core.token_space import make_segmentation


@pytest.fixture
def temp_directory() -> Generator[Path, None, None]:
    """Create a temporary directory for test files"""
    temp_dir = tempfile.mkdtemp()
    yield Path(temp_dir)
    shutil.rmtree(temp_dir, ignore_errors=True)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so every test run sees the same data"""
    return np.random.default_rng(20240611)


@pytest.fixture
def llava_segmentation():
    """LLaVA-1.5 style layout: 35 system, 576 image and 40 user tokens"""
    return make_segmentation(35, 576, 40)


@pytest.fixture(scope="session")
def plugins_loaded():
    """Load all plugins once for the session"""
    plugin_loader.ensure_loaded()
    return plugin_registry


def normalized_attention(rng: np.random.Generator, heads: int, n_query: int, n_key: int) -> np.ndarray:
    """(1, heads, n_query, n_key) tensor whose rows sum to 1"""
    raw = rng.random((1, heads, n_query, n_key)) + 1e-3
    return raw / raw.sum(axis=-1, keepdims=True)


@pytest.fixture
def make_run(temp_directory: Path, rng: np.random.Generator) -> Callable[..., Path]:
    """
    Factory writing synthetic tensors plus a manifest next to them.

    Returns the manifest path; tensor paths in the manifest are relative.
    """
    def _make(n_sys: int = 3, n_img: int = 16, n_usr: int = 4, dim: int = 8,
              keep: Optional[int] = None, ignore: Optional[int] = None,
              attention_heads: Optional[int] = 2, img: Optional[np.ndarray] = None,
              txt: Optional[np.ndarray] = None, name: str = "run.json", **extra) -> Path:
        img = rng.normal(size=(n_img, dim)) if img is None else img
        txt = rng.normal(size=(n_usr, dim)) if txt is None else txt
        write_tensor(img, temp_directory / "img.sigt")
        write_tensor(txt, temp_directory / "txt.sigt")
        manifest = {
            "n_sys": n_sys,
            "n_img": n_img,
            "n_usr": n_usr,
            "image_embeddings": "img.sigt",
            "text_embeddings": "txt.sigt",
        }
        if keep is None and ignore is None:
            ignore = n_img // 4
        if keep is not None:
            manifest["keep"] = keep
        if ignore is not None:
            manifest["ignore"] = ignore
        if attention_heads:
            total = n_sys + n_img + n_usr
            write_tensor(normalized_attention(rng, attention_heads, total, total),
                         temp_directory / "attn.sigt")
            manifest["attention"] = "attn.sigt"
        manifest.update(extra)
        path = temp_directory / name
        path.write_text(json.dumps(manifest), encoding="utf-8")
        return path

    return _make
