"""
Adapters package - file formats and rendering backends
"""
from .tensor_file import read_tensor, write_tensor, encode_tensor, decode_tensor
from .text_formats import write_csv, write_pgm, write_grid_csv, render_csv, render_pgm

__all__ = [
    'read_tensor', 'write_tensor', 'encode_tensor', 'decode_tensor',
    'write_csv', 'write_pgm', 'write_grid_csv', 'render_csv', 'render_pgm'
]
