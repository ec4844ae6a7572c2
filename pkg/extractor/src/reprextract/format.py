"""Writer for the labeled-representation binary format.

Layout (little-endian): magic ``b"MKTR"``, version uint32 = 1, n_points
uint32, dim uint32, then n*dim float32 features row-major, then n label
bytes (0/1). This mirrors the consumer's documented contract byte for byte;
the consumer's reader is the source of truth and validates files we emit.
"""

from __future__ import annotations

import os
import struct

import numpy as np

MAGIC = b"MKTR"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


def file_size(n_points: int, dim: int) -> int:
    return _HEADER.size + n_points * dim * 4 + n_points


def write_features(features: np.ndarray, labels: np.ndarray, path) -> None:
    """Write one features/labels block; fsyncs before returning."""
    features = np.asarray(features, dtype=np.float32)
    if features.ndim != 2:
        raise ValueError(f"features must be 2-d, got shape {features.shape}")
    n, dim = features.shape
    if n < 1:
        raise ValueError("need at least one point")
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise ValueError(f"labels must have shape ({n},), got {labels.shape}")
    if not np.isin(labels, (0, 1)).all():
        raise ValueError("labels must be binary (0/1)")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n, dim))
        fh.write(np.ascontiguousarray(features, dtype="<f4").tobytes())
        fh.write(labels.astype(np.uint8).tobytes())
        fh.flush()
        os.fsync(fh.fileno())
