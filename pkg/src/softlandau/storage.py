"""Raw binary layout shared by kernel-table caches and field checkpoints.

Layout (little-endian)::

    magic      8 bytes   b"SLANDAU\\0"
    format     uint32    FORMAT_VERSION
    quadrature uint32    quadrature version of the tables (0 for checkpoints)
    n          uint32    nodes per axis of the velocity grid
    count      uint32    number of stored components
    L          float64   half width of the velocity box
    gamma      float64   kernel exponent
    payload    float64[] components concatenated in order, each C-contiguous
"""

import struct

import numpy as np

MAGIC = b"SLANDAU\0"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sIIIIdd")


class StorageError(OSError):
    pass


def write_arrays(path, arrays, *, n, L, gamma, quadrature=0):
    arrays = [np.ascontiguousarray(a, dtype="<f8") for a in arrays]
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, quadrature, n, len(arrays), L, gamma)
    with open(path, "wb") as fh:
        fh.write(header)
        for a in arrays:
            fh.write(a.tobytes())


def read_arrays(path, shapes):
    """Read back the header and the components, reshaped to ``shapes``.

    Returns ``(header_dict, list_of_arrays)``.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise StorageError(f"{path}: truncated header")
    magic, fmt, quad, n, count, L, gamma = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise StorageError(f"{path}: bad magic {magic!r}")
    if fmt != FORMAT_VERSION:
        raise StorageError(f"{path}: unsupported format version {fmt}")
    if count != len(shapes):
        raise StorageError(f"{path}: expected {len(shapes)} components, found {count}")
    payload = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    sizes = [int(np.prod(s)) for s in shapes]
    if payload.size != sum(sizes):
        raise StorageError(f"{path}: payload has {payload.size} doubles, expected {sum(sizes)}")
    out, start = [], 0
    for shape, size in zip(shapes, sizes):
        out.append(payload[start:start + size].reshape(shape).astype(float))
        start += size
    header = {"format": fmt, "quadrature": quad, "n": n, "count": count, "L": L, "gamma": gamma}
    return header, out


def read_header(path):
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
    if len(raw) < _HEADER.size:
        raise StorageError(f"{path}: truncated header")
    magic, fmt, quad, n, count, L, gamma = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise StorageError(f"{path}: bad magic {magic!r}")
    return {"format": fmt, "quadrature": quad, "n": n, "count": count, "L": L, "gamma": gamma}
