"""Matrix file formats.

* CSV: one matrix row per line, comma separated, ``%.17g`` round-trip precision.
* SPMX binary: ``b"SPMX"``, little-endian u64 rows, u64 cols, then the
  little-endian float64 payload in column-major order.
"""
import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"SPMX"
_HEADER = struct.Struct("<4sQQ")


def write_binary(path, a):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("only 2-D matrices can be written")
    rows, cols = a.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, rows, cols))
        fh.write(a.astype("<f8").tobytes(order="F"))


def read_binary(path):
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated SPMX header")
    magic, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    payload = raw[_HEADER.size:]
    if len(payload) != 8 * rows * cols:
        raise ValueError(f"{path}: payload has {len(payload)} bytes, expected {8 * rows * cols}")
    data = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return data.reshape((rows, cols), order="F")


def write_csv(path, a):
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    np.savetxt(path, a, delimiter=",", fmt="%.17g")


def read_csv(path):
    a = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    return np.asfortranarray(a)


def read_matrix(path):
    """Read by extension: ``.csv`` is CSV, anything else is SPMX binary."""
    if str(path).lower().endswith(".csv"):
        return read_csv(path)
    return read_binary(path)


def write_matrix(path, a):
    if str(path).lower().endswith(".csv"):
        write_csv(path, a)
    else:
        write_binary(path, a)


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
