"""Bit-exact file format for labeled representation datasets.

Binary layout (little-endian):

====================  ========================================
bytes 0..3            magic ``b"MKTR"``
bytes 4..7            format version, uint32 (currently 1)
bytes 8..11           n_points, uint32 (>= 1)
bytes 12..15          dim, uint32
next n*dim*4 bytes    IEEE-754 float32 representations, row-major
next n bytes          labels, one byte each, 0 or 1
====================  ========================================

Representations are stored in 32-bit precision and widened to 64-bit in
memory. The format stores no weights: populations must be uniform. This
layout is the interchange contract with external feature extractors.
"""

from __future__ import annotations

import os
import struct

import numpy as np

from .errors import ReprFormatError, UnsupportedReprVersion
from .population import Population

MAGIC = b"MKTR"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


def file_size(n_points: int, dim: int) -> int:
    """Exact byte size of a file holding n_points points of width dim."""
    return _HEADER.size + n_points * dim * 4 + n_points


def write_repr(population: Population, path) -> None:
    """Write a uniform-weight population to ``path``; fsyncs on success."""
    if not population.has_uniform_weights():
        raise ValueError(
            f"cannot write {path}: representation files store no weights, "
            "population weights must be uniform"
        )
    header = _HEADER.pack(MAGIC, VERSION, population.n, population.dim)
    floats = np.ascontiguousarray(population.X, dtype="<f4").tobytes()
    labels = population.y.astype(np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(floats)
        fh.write(labels)
        fh.flush()
        os.fsync(fh.fileno())


def read_repr(path) -> Population:
    """Read a representation file back as a uniform-weight population."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise ReprFormatError(f"{path}: truncated header ({len(blob)} bytes)")
    magic, version, n_points, dim = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ReprFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise UnsupportedReprVersion(f"{path}: unsupported format version {version}")
    if n_points < 1:
        raise ReprFormatError(f"{path}: n_points must be >= 1")
    expected = file_size(n_points, dim)
    if len(blob) != expected:
        raise ReprFormatError(
            f"{path}: file holds {len(blob)} bytes, header implies {expected}"
        )
    float_bytes = n_points * dim * 4
    X = np.frombuffer(blob, dtype="<f4", count=n_points * dim, offset=_HEADER.size)
    X = X.reshape(n_points, dim).astype(np.float64)
    labels = np.frombuffer(blob, dtype=np.uint8, count=n_points, offset=_HEADER.size + float_bytes)
    if not np.isin(labels, (0, 1)).all():
        bad = int(np.flatnonzero(~np.isin(labels, (0, 1)))[0])
        raise ReprFormatError(f"{path}: label byte {labels[bad]} at point {bad} is not 0/1")
    return Population(X, labels)


def read_csv_repr(path) -> Population:
    """Read a text file of ``x_1,...,x_D,label`` rows as a population.

    The dimension is inferred from the first data row and enforced after
    that. A non-numeric first row is treated as a header and skipped,
    provided every later row parses.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    rows = []
    labels = []
    dim = None
    header_skipped = False
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(",")]
        try:
            values = [float(f) for f in fields[:-1]]
            label = int(fields[-1])
        except ValueError:
            if lineno == 1 and not rows:
                header_skipped = True
                continue
            raise ReprFormatError(f"{path}: line {lineno}: cannot parse {line!r}") from None
        if label not in (0, 1):
            raise ReprFormatError(f"{path}: line {lineno}: label {label} is not 0/1")
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise ReprFormatError(
                f"{path}: line {lineno}: row has {len(values)} features, expected {dim}"
            )
        rows.append(values)
        labels.append(label)
    if not rows:
        detail = " (only a header)" if header_skipped else ""
        raise ReprFormatError(f"{path}: no data rows{detail}")
    return Population(np.asarray(rows, dtype=np.float64).reshape(len(rows), dim), np.asarray(labels))
