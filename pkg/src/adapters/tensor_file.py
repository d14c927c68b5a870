"""
Reader and writer for the SIGT v1 tensor container.

Layout (all little-endian)::

    offset  size        field
    0       4           magic  b"SIGT"
    4       4  (u32)    version = 1
    8       4  (u32)    ndim
    12      8*ndim      dims (u64 each)
    ...     4*prod(dims) payload, row-major IEEE-754 binary32

Exporters from ML runtimes only need to write this header followed by
``array.astype('<f4').tobytes()``; half-precision tensors must be upcast first.
"""
import logging
import struct
import sys
from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np

from src.core.errors import BadMagic, BadVersion, DimOverflow, LengthMismatch, TruncatedPayload
from src.utils.resources import ensure_parent_exists

logger = logging.getLogger(__name__)

MAGIC = b"SIGT"
VERSION = 1
MAX_NDIM = 32
PAYLOAD_DTYPE = np.dtype("<f4")
_PREFIX = struct.Struct("<4sII")
_DIM = struct.Struct("<Q")

PathLike = Union[str, Path]


def encode_tensor(tensor) -> bytes:
    """Serialise an array as a SIGT v1 byte string"""
    array = np.asarray(tensor)
    if array.dtype != PAYLOAD_DTYPE:
        array = array.astype(PAYLOAD_DTYPE)
    if array.ndim > MAX_NDIM:
        raise DimOverflow(f"{array.ndim} dimensions exceed the limit of {MAX_NDIM}")
    header = _PREFIX.pack(MAGIC, VERSION, array.ndim)
    header += b"".join(_DIM.pack(int(d)) for d in array.shape)
    return header + np.ascontiguousarray(array).tobytes(order="C")


def _payload_size(dims: Sequence[int]) -> int:
    count = 1
    for d in dims:
        count *= d
    size = count * PAYLOAD_DTYPE.itemsize
    if size > sys.maxsize:
        raise DimOverflow(f"dims {tuple(dims)} describe more than {sys.maxsize} bytes")
    return size


def decode_header(raw: bytes) -> Tuple[Tuple[int, ...], int]:
    """Parse and validate the header; returns (dims, payload offset)"""
    if len(raw) < 4 or raw[:4] != MAGIC:
        raise BadMagic(f"expected magic {MAGIC!r}, got {bytes(raw[:4])!r}")
    if len(raw) < _PREFIX.size:
        raise TruncatedPayload(f"header needs {_PREFIX.size} bytes, got {len(raw)}")
    _, version, ndim = _PREFIX.unpack_from(raw, 0)
    if version != VERSION:
        raise BadVersion(f"unsupported version {version}, expected {VERSION}")
    if ndim > MAX_NDIM:
        raise DimOverflow(f"{ndim} dimensions exceed the limit of {MAX_NDIM}")
    offset = _PREFIX.size + ndim * _DIM.size
    if len(raw) < offset:
        raise TruncatedPayload(f"header declares {ndim} dims but the file ends at byte {len(raw)}")
    dims = tuple(_DIM.unpack_from(raw, _PREFIX.size + i * _DIM.size)[0] for i in range(ndim))
    return dims, offset


def decode_tensor(raw: bytes) -> np.ndarray:
    """Parse a SIGT v1 byte string into a float32 array"""
    dims, offset = decode_header(raw)
    expected = _payload_size(dims)
    actual = len(raw) - offset
    if actual < expected:
        raise TruncatedPayload(f"payload for dims {dims} needs {expected} bytes, got {actual}")
    if actual > expected:
        raise LengthMismatch(f"payload for dims {dims} needs {expected} bytes, got {actual}")
    if expected == 0:
        return np.zeros(dims, dtype=PAYLOAD_DTYPE)
    array = np.frombuffer(raw, dtype=PAYLOAD_DTYPE, offset=offset).reshape(dims)
    return array.copy()


def read_tensor(path: PathLike) -> np.ndarray:
    """Read and validate a tensor file"""
    raw = Path(path).read_bytes()
    array = decode_tensor(raw)
    logger.debug("read tensor %s with shape %s", path, array.shape)
    return array


def write_tensor(tensor, path: PathLike) -> Path:
    """Write a tensor file, creating the parent directory if needed"""
    target = ensure_parent_exists(path)
    target.write_bytes(encode_tensor(tensor))
    logger.debug("wrote tensor %s", target)
    return target
