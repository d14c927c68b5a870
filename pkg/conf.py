# Sphinx configuration for the Simignore toolkit API reference.
#
# Build with:  sphinx-build -b html . _build/html

import os
import sys
sys.path.insert(0, os.path.abspath('.'))

from src import __version__  # noqa: E402

# -- Project information -----------------------------------------------------

project = 'Simignore'
copyright = '2026, Simignore developers'
author = 'Simignore developers'
version = '.'.join(__version__.split('.')[:2])
release = __version__

# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx.ext.viewcode',
    'sphinx.ext.intersphinx',
    'sphinx_autodoc_typehints',
]

# numpy arrays, tensors and renderers are documented from the source
autodoc_member_order = 'bysource'
autodoc_default_options = {
    'members': True,
    'undoc-members': False,
    'show-inheritance': True,
    'exclude-members': '__weakref__, __hash__',
}
# the PNG backend is optional at docs-build time
autodoc_mock_imports = ['matplotlib']

typehints_defaults = 'comma'
always_document_param_types = False

napoleon_google_docstring = True
napoleon_numpy_docstring = False

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'sklearn': ('https://scikit-learn.org/stable/', None),
}

# the repository root holds more than the docs sources
exclude_patterns = [
    '_build', 'examples', 'tests', '.pytest_cache',
    'SPEC_FULL.md', 'spec.md', 'DESIGN.md', 'TRIAGE.md', 'REVIEW_FINDINGS.md',
]

# -- Options for HTML output -------------------------------------------------

html_theme = 'alabaster'
html_title = f'Simignore {release}'
